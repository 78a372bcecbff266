"""Exception hierarchy shared by every module."""


class MatroidError(Exception):
    """Base class for all library errors."""


class ParseError(MatroidError):
    pass


class NotAMatroid(MatroidError):
    """Declared data violates the matroid axioms.

    ``pair`` holds the offending witness (two sets, or a set and an element)
    as label tuples when one is available.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class OutOfRange(MatroidError):
    pass


class OverlapError(MatroidError):
    pass


class TooLarge(MatroidError):
    pass


class UnknownFamily(MatroidError):
    pass


class UnsupportedParam(MatroidError):
    pass


class NotAFlat(MatroidError):
    pass


class LabelClash(MatroidError):
    pass


class InvalidCut(MatroidError):
    pass


class NotNonModular(MatroidError):
    pass


class NotIntersectable(MatroidError):
    pass


class IsOTE(MatroidError):
    """No intersectable non-modular pair exists."""


class PreconditionFailed(MatroidError):
    pass


class RestrictionMismatch(MatroidError):
    def __init__(self, message, flat=None):
        super().__init__(message)
        self.flat = flat


class NotInLattice(MatroidError):
    pass


class Inconclusive(MatroidError):
    pass


class ConstructionError(MatroidError):
    """A construction finished but one of its verified postconditions failed."""
