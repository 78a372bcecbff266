"""Amalgams of two extensions of a common restriction.

With ``E = E1 ∪ E2`` and ``T = E1 ∩ E2`` the candidate rank function is

    η(X) = r1(X ∩ E1) + r2(X ∩ E2) − r(X ∩ T)
    ξ(X) = min{η(Y) : Y ⊇ X}

and the minimum may be taken over the lattice ``L`` of sets whose traces on
``E1`` and ``E2`` are flats.  When ξ is submodular it is the rank function of
the proper amalgam.

Subsets of ``E`` are bitmasks in the element order of :attr:`AmalgamContext.labels`:
the elements of ``M1`` first (same indices as in ``M1``), then ``E2 \\ T`` in
``M2`` order.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .core import (
    Matroid,
    bits,
    check_rank_axioms,
    mask_key,
    popcount,
    restriction_by_labels,
    same_matroid,
)
from .errors import ConstructionError, Inconclusive, NotInLattice, PreconditionFailed, RestrictionMismatch
from .modularity import modular_defect

BRUTE_EXHAUSTIVE_BOUND = 12
DEFAULT_BRUTE_SAMPLES = 100_000
DEFAULT_EXCLUSION_SAMPLES = 10**4


class _Remap:
    """Bit permutation between two index spaces, via 8-bit lookup tables."""

    def __init__(self, targets: list[int]):
        self.tables = []
        for start in range(0, len(targets), 8):
            chunk = targets[start : start + 8]
            table = [0] * (1 << len(chunk))
            for byte in range(1, len(table)):
                low = byte & -byte
                table[byte] = table[byte ^ low] | (1 << chunk[low.bit_length() - 1])
            self.tables.append(table)

    def __call__(self, mask: int) -> int:
        out = 0
        for table in self.tables:
            if not mask:
                break
            out |= table[mask & 0xFF]
            mask >>= 8
        return out


def _restriction_mismatch(A: Matroid, B: Matroid):
    """First flat (as labels) that one restriction has and the other lacks."""
    fa, fb = A.flat_set(), B.flat_set()
    diff = sorted(fa ^ fb, key=lambda kf: (kf[0], sorted(kf[1])))
    return diff[0] if diff else None


class AmalgamContext:
    """Everything needed to evaluate η and ξ for a pair of extensions."""

    def __init__(self, M1: Matroid, M2: Matroid):
        shared = set(M1.labels) & set(M2.labels)
        if not shared:
            raise RestrictionMismatch("the two matroids share no elements")
        R1 = restriction_by_labels(M1, shared)
        R2 = restriction_by_labels(M2, shared)
        if not same_matroid(R1, R2):
            rank_k, labels = _restriction_mismatch(R1, R2)
            raise RestrictionMismatch(
                f"restrictions to the common elements differ at flat {{{' '.join(sorted(labels))}}} (rank {rank_k})",
                flat=tuple(sorted(labels)),
            )
        self.M1, self.M2 = M1, M2
        self.M = R1
        self.labels: tuple[str, ...] = M1.labels + tuple(lab for lab in M2.labels if lab not in shared)
        self.n = len(self.labels)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self.E1 = (1 << M1.n) - 1
        self.E2 = sum(1 << self.index[lab] for lab in M2.labels)
        self.T = sum(1 << M1.index(lab) for lab in shared)
        self.ground = (1 << self.n) - 1
        in2 = set(M2.labels)
        # E-elements outside E2 are masked off before remapping, so their slot is unused
        self._to2 = _Remap([M2.index(lab) if lab in in2 else 0 for lab in self.labels])
        self._from2 = _Remap([self.index[lab] for lab in M2.labels])

        # L: compatible pairs of flats grouped by their trace on T
        by_trace: dict[int, list[int]] = {}
        for F2 in M2.all_flats():
            F2e = self._from2(F2)
            by_trace.setdefault(F2e & self.T, []).append(F2e)
        lattice = []
        parts = {}
        for F1 in M1.all_flats():
            for F2e in by_trace.get(F1 & self.T, ()):
                X = F1 | F2e
                lattice.append(X)
                parts[X] = (F1, F2e)
        lattice.sort(key=lambda X: (popcount(X), mask_key(X)))
        self.lattice: list[int] = lattice
        self.lattice_set = frozenset(lattice)
        self.parts = parts
        self._eta: dict[int, int] = {}
        self._xi: dict[int, int] = {}
        self.eta_on_lattice = {X: self.eta(X) for X in lattice}
        self._by_eta = sorted(lattice, key=lambda X: (self.eta_on_lattice[X], popcount(X), mask_key(X)))

    # -- conversions -------------------------------------------------------
    def mask(self, X) -> int:
        if isinstance(X, int):
            return X
        if isinstance(X, str):
            X = X.split()
        out = 0
        for lab in X:
            out |= 1 << self.index[lab]
        return out

    def labels_of(self, X: int) -> tuple[str, ...]:
        return tuple(self.labels[i] for i in bits(X))

    def fmt(self, X: int) -> str:
        return "{" + " ".join(self.labels_of(X)) + "}"

    def part1(self, X: int) -> int:
        """Trace on ``E1`` as a mask of ``M1``."""
        return X & self.E1

    def part2(self, X: int) -> int:
        """Trace on ``E2`` as a mask of ``M2``."""
        return self._to2(X & self.E2)

    def from_m2(self, X2: int) -> int:
        return self._from2(X2)

    # -- rank-like functions -----------------------------------------------
    def eta(self, X: int) -> int:
        v = self._eta.get(X)
        if v is None:
            v = self.M1.rank(X & self.E1) + self.M2.rank(self.part2(X)) - self.M1.rank(X & self.T)
            self._eta[X] = v
        return v

    def xi(self, X: int) -> int:
        v = self._xi.get(X)
        if v is None:
            for Z in self._by_eta:
                if Z & X == X:
                    v = self.eta_on_lattice[Z]
                    break
            self._xi[X] = v
        return v

    def phi1(self, X: int) -> int:
        return self.M1.closure(X & self.E1) | (X & self.E2)

    def phi2(self, X: int) -> int:
        return (X & self.E1) | self.from_m2(self.M2.closure(self.part2(X)))

    def smallest_member(self, X: int) -> int:
        """Least member of ``L`` containing ``X``: alternate φ1, φ2 to a fixpoint."""
        Z = X
        while True:
            nxt = self.phi2(self.phi1(Z))
            if nxt == Z:
                return Z
            Z = nxt


def build_context(M1: Matroid, M2: Matroid) -> AmalgamContext:
    return AmalgamContext(M1, M2)


def eta(ctx: AmalgamContext, X) -> int:
    return ctx.eta(ctx.mask(X))


def xi(ctx: AmalgamContext, X) -> int:
    return ctx.xi(ctx.mask(X))


def lattice_meet_join(ctx: AmalgamContext, X, Y) -> tuple[int, int]:
    X, Y = ctx.mask(X), ctx.mask(Y)
    for Z in (X, Y):
        if Z not in ctx.lattice_set:
            raise NotInLattice(f"{ctx.fmt(Z)} is not in the lattice")
    return X & Y, ctx.smallest_member(X | Y)


def submodular_gap(f, X: int, Y: int) -> int:
    """``f(X) + f(Y) − f(X ∩ Y) − f(X ∪ Y)``; negative means a violation."""
    return f(X) + f(Y) - f(X & Y) - f(X | Y)


# -- proper amalgam --------------------------------------------------------------
@dataclass
class SubmodularityReport:
    status: str  # "exists" or "fails"
    context: AmalgamContext
    pair: tuple[int, int] | None = None
    values: dict[str, int] | None = None
    amalgam: Matroid | None = None
    pairs_checked: int = 0
    eta_violations: int = 0
    diagnostics: list[tuple[int, int]] = field(default_factory=list)
    brute: dict | None = None
    extra: dict = field(default_factory=dict)

    @property
    def lattice_size(self) -> int:
        return len(self.context.lattice)

    def recheck(self) -> bool:
        """Re-verify from the reported numbers that the pair violates submodularity."""
        v = self.values
        return v is not None and v["xi_X"] + v["xi_Y"] < v["xi_meet"] + v["xi_union"]

    def as_dict(self) -> dict:
        ctx = self.context
        out = {
            "status": self.status,
            "elements": list(ctx.labels),
            "common": list(ctx.labels_of(ctx.T)),
            "lattice_size": self.lattice_size,
            "pairs_checked": self.pairs_checked,
            "eta_violations": self.eta_violations,
            "eta_violations_rescued_by_xi": len(self.diagnostics),
        }
        if self.pair is not None:
            X, Y = self.pair
            out["violating_pair"] = {
                "X": list(ctx.labels_of(X)),
                "Y": list(ctx.labels_of(Y)),
                "X_and_Y": list(ctx.labels_of(X & Y)),
                "X_or_Y": list(ctx.labels_of(X | Y)),
                **self.values,
                "deficit": self.values["xi_meet"] + self.values["xi_union"] - self.values["xi_X"] - self.values["xi_Y"],
            }
        if self.amalgam is not None:
            out["amalgam_rank"] = self.amalgam.rank()
            out["amalgam_flat_counts"] = self.amalgam.flat_counts()
        if self.brute is not None:
            out["brute_check"] = self.brute
        out.update(self.extra)
        return out


def _lattice_pairs(ctx: AmalgamContext):
    L = ctx.lattice
    for i, X in enumerate(L):
        for Y in L[i + 1 :]:
            inter = X & Y
            if inter == X or inter == Y:
                continue
            yield X, Y


def amalgam_from_xi(ctx: AmalgamContext, name: str | None = None) -> Matroid:
    """Matroid whose flats are the ξ-closed members of ``L``.

    Every flat of an amalgam traces to flats of ``M1`` and ``M2``, so only
    lattice members need to be tested for closedness.
    """
    levels: dict[int, list[int]] = {}
    for Z in ctx.lattice:
        rz = ctx.xi(Z)
        if all(ctx.xi(Z | (1 << x)) > rz for x in bits(ctx.ground & ~Z)):
            levels.setdefault(rz, []).append(Z)
    top = max(levels)
    return Matroid(ctx.labels, [levels.get(k, []) for k in range(top + 1)], name=name)


def brute_xi_check(ctx: AmalgamContext, bound: int = BRUTE_EXHAUSTIVE_BOUND, samples: int = DEFAULT_BRUTE_SAMPLES, seed: int = 1):
    """Rank axioms for ξ on all subset pairs (``|E| <= bound``) or on samples."""
    report = check_rank_axioms(ctx.n, ctx.xi, exhaustive_limit=bound, samples=samples, seed=seed)
    return report


def proper_amalgam(
    M1: Matroid,
    M2: Matroid,
    *,
    brute_check: bool = False,
    brute_bound: int = BRUTE_EXHAUSTIVE_BOUND,
    samples: int = DEFAULT_BRUTE_SAMPLES,
    seed: int = 1,
    name: str | None = None,
) -> SubmodularityReport:
    """Decide whether ξ is submodular and build the proper amalgam if so.

    Every pair of incomparable lattice members is tested for the submodular
    inequality of η, and of ξ where η fails.  A pair failing both is itself a
    violation of ξ, reported with its four ξ values (the first such pair in
    lattice order).  If none fails both, ξ is submodular on all of ``E``.
    """
    ctx = build_context(M1, M2)
    checked = 0
    eta_bad = 0
    rescued: list[tuple[int, int]] = []
    for X, Y in _lattice_pairs(ctx):
        checked += 1
        if submodular_gap(ctx.eta, X, Y) >= 0:
            continue
        eta_bad += 1
        if submodular_gap(ctx.xi, X, Y) >= 0:
            rescued.append((X, Y))
            continue
        values = {
            "xi_X": ctx.xi(X),
            "xi_Y": ctx.xi(Y),
            "xi_meet": ctx.xi(X & Y),
            "xi_union": ctx.xi(X | Y),
        }
        return SubmodularityReport(
            "fails", ctx, pair=(X, Y), values=values, pairs_checked=checked,
            eta_violations=eta_bad, diagnostics=rescued,
        )

    report = SubmodularityReport("exists", ctx, pairs_checked=checked, eta_violations=eta_bad, diagnostics=rescued)
    if brute_check:
        br = brute_xi_check(ctx, brute_bound, samples, seed)
        report.brute = {"ok": br.ok, "mode": br.mode, "checked": br.checked}
        if not br.ok:
            raise Inconclusive(
                f"every lattice pair passed but ξ fails the rank axioms on subsets "
                f"{ctx.fmt(br.violation[0])}, {ctx.fmt(br.violation[1])}"
            )
    A = amalgam_from_xi(ctx, name=name or "amalgam")
    if not verify_amalgam(A, M1, M2):
        raise ConstructionError("proper amalgam does not restrict to the two extensions")
    report.amalgam = A
    return report


def verify_amalgam(A: Matroid, M1: Matroid, M2: Matroid) -> bool:
    """Whether ``A`` lives on ``E1 ∪ E2`` and restricts to ``M1`` and ``M2``."""
    if set(A.labels) != set(M1.labels) | set(M2.labels):
        return False
    return same_matroid(restriction_by_labels(A, M1.labels), M1) and same_matroid(
        restriction_by_labels(A, M2.labels), M2
    )


def xi_submodular_on_lattice(ctx: AmalgamContext) -> tuple[int, int] | None:
    """First pair of lattice members on which ξ is not submodular, if any."""
    for X, Y in _lattice_pairs(ctx):
        if submodular_gap(ctx.xi, X, Y) < 0:
            return X, Y
    return None


# -- anatomy of η violations ------------------------------------------------------
@dataclass(frozen=True)
class EtaViolation:
    X: int
    Y: int
    gap: int
    defect_identity: int  # δ1 + δ2 − δT
    modular_in_1: bool
    modular_in_2: bool
    trace_shape: str
    xi_is_eta: bool


def _trace_shape(M1: Matroid, A: int, B: int) -> str:
    ra, rb = M1.rank(A), M1.rank(B)
    if A & B:
        return "meeting"
    if ra == rb == 2 and M1.rank(A | B) == 3:
        return "coplanar-lines"
    if sorted((ra, rb)) == [2, 3]:
        return "line-plane"
    return "other"


def eta_violation_anatomy(ctx: AmalgamContext) -> list[EtaViolation]:
    """Every lattice pair violating η-submodularity, dissected.

    The gap of η equals ``δ1(X∩E1, Y∩E1) + δ2(X∩E2, Y∩E2) − δ(X∩T, Y∩T)``;
    both sides are computed independently.
    """
    out = []
    M1, M2 = ctx.M1, ctx.M2
    for X, Y in _lattice_pairs(ctx):
        gap = submodular_gap(ctx.eta, X, Y)
        if gap >= 0:
            continue
        d1 = modular_defect(M1, X & ctx.E1, Y & ctx.E1)
        d2 = modular_defect(M2, ctx.part2(X), ctx.part2(Y))
        dT = modular_defect(M1, X & ctx.T, Y & ctx.T)
        out.append(
            EtaViolation(
                X, Y, gap, d1 + d2 - dT, d1 == 0, d2 == 0,
                _trace_shape(M1, X & ctx.T, Y & ctx.T),
                ctx.xi(X) == ctx.eta(X) and ctx.xi(Y) == ctx.eta(Y),
            )
        )
    return out


# -- modular pairs that cannot occur -------------------------------------------
@dataclass(frozen=True)
class ExclusionViolation:
    X: tuple[str, ...]
    Y: tuple[str, ...]
    shape: str


def _is_extension(M: Matroid, Mp: Matroid) -> bool:
    if not set(M.labels) <= set(Mp.labels):
        return False
    return same_matroid(restriction_by_labels(Mp, M.labels), M)


def modular_pair_exclusion_check(
    M: Matroid,
    Mp: Matroid,
    *,
    samples: int = DEFAULT_EXCLUSION_SAMPLES,
    seed: int = 1,
    exhaustive_limit: int = 10,
    check_preconditions: bool = True,
) -> list[ExclusionViolation]:
    """Search ``Mp`` for modular pairs of the two shapes that an OTE rank-4
    restriction rules out.

    * ``lines``: ``X ∩ T`` and ``Y ∩ T`` disjoint coplanar lines, ``X ∩ Y``
      a flat and ``T`` not spanned by ``X ∪ Y``;
    * ``line-plane``: ``X ∩ T`` a plane ``e``, ``Y ∩ T`` a line disjoint from
      it, ``X ∩ Y`` a flat and some line of ``e`` coplanar with ``Y ∩ T`` on
      which ``(X ∩ Y) ∪ e`` drops exactly one in rank.

    Every subset pair is scanned when ``|E(Mp)| <= exhaustive_limit``.
    Otherwise candidates are ``X = s ∪ C ∪ A``, ``Y = t ∪ C ∪ B`` with
    ``(s, t)`` a shape from ``M``, ``C`` a flat of ``Mp`` missing ``T`` and
    ``A, B`` disjoint sets of new elements; all of them when there are at
    most ``samples``, else ``samples`` seeded draws.
    """
    if check_preconditions:
        from .cuts import is_OTE

        if M.rank() != 4:
            raise PreconditionFailed(f"needs a rank-4 matroid, got rank {M.rank()}")
        if not is_OTE(M):
            raise PreconditionFailed("restriction is not OTE")
    if not _is_extension(M, Mp):
        raise PreconditionFailed("second matroid is not an extension of the first")

    T = Mp.mask(M.labels)
    to_p = {M.index(lab): Mp.index(lab) for lab in M.labels}

    def lift(m: int) -> int:
        out = 0
        for i in bits(m):
            out |= 1 << to_p[i]
        return out

    lines = list(M.lines())
    planes = list(M.planes())
    line_pairs = []
    for i, a in enumerate(lines):
        for b in lines[i + 1 :]:
            if a & b == 0 and M.rank(a | b) == 3:
                line_pairs.append((lift(a), lift(b)))
    line_planes = []
    for e in planes:
        inside = [l for l in lines if l & e == l]
        for b in lines:
            if b & e:
                continue
            copl = [lift(l) for l in inside if M.rank(l | b) == 3]
            if copl:
                line_planes.append((lift(e), lift(b), tuple(copl)))

    found: list[ExclusionViolation] = []
    seen = set()
    rank = Mp.rank

    def test(X: int, Y: int) -> None:
        C = X & Y
        if not Mp.is_flat(C):
            return
        xt, yt = X & T, Y & T
        shape = None
        if xt != yt and (min(xt, yt), max(xt, yt)) in pair_lookup and Mp.closure(X | Y) & T != T:
            shape = "lines"
        elif (xt, yt) in plane_lookup:
            rc = rank(C | xt)
            if any(rc == rank(C | l) + 1 for l in plane_lookup[(xt, yt)]):
                shape = "line-plane"
        if shape is None:
            return
        if rank(X) + rank(Y) == rank(X | Y) + rank(C):
            key = (min(X, Y), max(X, Y))
            if key not in seen:
                seen.add(key)
                found.append(ExclusionViolation(Mp.labels_of(X), Mp.labels_of(Y), shape))

    pair_lookup = {(min(a, b), max(a, b)) for a, b in line_pairs}
    plane_lookup = {(e, b): copl for e, b, copl in line_planes}

    if Mp.n <= exhaustive_limit:
        for X in range(1 << Mp.n):
            for Y in range(X + 1, 1 << Mp.n):
                test(X, Y)
                test(Y, X)
        return found

    extra = Mp.ground & ~T
    extra_bits = bits(extra)
    shapes = [(a, b) for a, b in line_pairs] + [(e, b) for e, b, _ in line_planes]
    cores = [C for C in Mp.all_flats() if not C & T]
    total = len(shapes) * sum(3 ** (len(extra_bits) - popcount(C)) for C in cores)
    if not shapes:
        return found
    if total <= samples:
        for s, t in shapes:
            for C in cores:
                free = [i for i in extra_bits if not C >> i & 1]
                for assign in itertools.product(range(3), repeat=len(free)):
                    A = sum(1 << i for i, c in zip(free, assign) if c == 1)
                    B = sum(1 << i for i, c in zip(free, assign) if c == 2)
                    test(s | C | A, t | C | B)
        return found
    rng = random.Random(seed)
    for _ in range(samples):
        s, t = shapes[rng.randrange(len(shapes))]
        C = cores[rng.randrange(len(cores))]
        A = B = 0
        for i in extra_bits:
            if C >> i & 1:
                continue
            c = rng.randrange(3)
            if c == 1:
                A |= 1 << i
            elif c == 2:
                B |= 1 << i
        test(s | C | A, t | C | B)
    return found
