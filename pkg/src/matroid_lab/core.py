"""Finite matroids stored as their lattice of flats.

Subsets of the ground set are plain ``int`` bitmasks: bit ``i`` is set when
the element with index ``i`` (declaration order) is present.  Every public
function that takes a subset also accepts a whitespace separated label string
or an iterable of labels; :meth:`Matroid.mask` does the conversion.

Element indices are stable under single-element extensions (the new element
is appended), so masks taken in ``M`` stay valid in any extension built by
this package.  Minors re-index, so cross them with labels.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    LabelClash,
    NotAMatroid,
    OutOfRange,
    OverlapError,
    ParseError,
    TooLarge,
)

DEFAULT_ISO_BOUND = 20
EXHAUSTIVE_AXIOM_LIMIT = 10
DEFAULT_AXIOM_SAMPLES = 100_000

_CACHE_LIMIT = 500_000


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask``, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_key(mask: int) -> tuple[int, ...]:
    return tuple(bits(mask))


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def _check_labels(labels: Sequence[str]) -> None:
    seen = set()
    for lab in labels:
        if not isinstance(lab, str) or not lab or any(c.isspace() for c in lab):
            raise ParseError(f"invalid element label {lab!r}")
        if lab in seen:
            raise LabelClash(f"duplicate element label {lab!r}")
        seen.add(lab)


class Matroid:
    """Immutable finite matroid given by its flats grouped by rank.

    ``flats_by_rank[k]`` lists the rank-``k`` flats as bitmasks.  The
    constructor trusts the lattice; :func:`check_flat_axioms` and
    :func:`check_rank_axioms` verify it.
    """

    def __init__(self, labels: Sequence[str], flats_by_rank, name: str | None = None):
        labels = tuple(labels)
        _check_labels(labels)
        self._labels = labels
        self._index = {lab: i for i, lab in enumerate(labels)}
        self._n = len(labels)
        self.name = name
        full = (1 << self._n) - 1

        levels = []
        for level in flats_by_rank:
            levels.append(tuple(sorted(set(int(F) for F in level), key=mask_key)))
        if not levels or len(levels[0]) != 1:
            raise NotAMatroid("there must be exactly one rank-0 flat")
        if levels[-1] != (full,):
            raise NotAMatroid("the ground set must be the unique flat of top rank")
        self._flats = tuple(levels)
        self._r = len(levels) - 1
        self._flat_rank: dict[int, int] = {}
        self._pos: dict[int, int] = {}
        for k, level in enumerate(levels):
            for pos, F in enumerate(level):
                self._pos[F] = pos
                if F & ~full:
                    raise NotAMatroid("flat mentions an element outside the ground set")
                if F in self._flat_rank:
                    raise NotAMatroid(f"flat {self.labels_of(F)} listed twice")
                self._flat_rank[F] = k

        # _inc[k][i]: bitset over rank-k flat positions of the flats containing i
        self._inc = []
        self._all = []
        for level in levels:
            inc = [0] * self._n
            for pos, F in enumerate(level):
                for i in bits(F):
                    inc[i] |= 1 << pos
            self._inc.append(inc)
            self._all.append((1 << len(level)) - 1)
        self._cache: dict[int, tuple[int, int]] = {}
        self._covers: dict[int, tuple[int, ...]] | None = None
        self._hash = None

    # -- ground set ---------------------------------------------------------
    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def n(self) -> int:
        return self._n

    @property
    def ground(self) -> int:
        return (1 << self._n) - 1

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ParseError(f"unknown element {label!r}") from None

    def mask(self, X) -> int:
        """Convert a subset given as mask, label string or label iterable."""
        if isinstance(X, (int, np.integer)):
            X = int(X)
            if X < 0 or X >> self._n:
                raise ParseError(f"mask {X} outside ground set of size {self._n}")
            return X
        if isinstance(X, str):
            X = X.split()
        m = 0
        for lab in X:
            m |= 1 << self.index(lab)
        return m

    def labels_of(self, mask: int) -> tuple[str, ...]:
        return tuple(self._labels[i] for i in bits(mask))

    def fmt(self, mask: int) -> str:
        return "{" + " ".join(self.labels_of(mask)) + "}"

    # -- rank and closure ---------------------------------------------------
    def _lookup(self, X: int) -> tuple[int, int]:
        hit = self._cache.get(X)
        if hit is not None:
            return hit
        idx = bits(X)
        for k in range(self._r + 1):
            cand = self._all[k]
            inc = self._inc[k]
            for i in idx:
                cand &= inc[i]
                if not cand:
                    break
            if cand:
                pos = (cand & -cand).bit_length() - 1
                res = (k, self._flats[k][pos])
                break
        else:  # pragma: no cover - the ground set is always a flat
            raise AssertionError("ground set missing from the flat lattice")
        if len(self._cache) > _CACHE_LIMIT:
            self._cache.clear()
        self._cache[X] = res
        return res

    def rank(self, X=None) -> int:
        """Rank of ``X``; the rank of the matroid when ``X`` is omitted."""
        if X is None:
            return self._r
        return self._lookup(self.mask(X))[0]

    def closure(self, X) -> int:
        return self._lookup(self.mask(X))[1]

    def is_flat(self, X) -> bool:
        return self.mask(X) in self._flat_rank

    def flat_rank(self, F: int) -> int:
        return self._flat_rank[F]

    def flats(self, k: int) -> tuple[int, ...]:
        if not 0 <= k <= self._r:
            raise OutOfRange(f"rank {k} outside 0..{self._r}")
        return self._flats[k]

    @property
    def flats_by_rank(self) -> tuple[tuple[int, ...], ...]:
        return self._flats

    def all_flats(self) -> list[int]:
        return [F for level in self._flats for F in level]

    def num_flats(self) -> int:
        return len(self._flat_rank)

    def hyperplanes(self) -> tuple[int, ...]:
        return self._flats[self._r - 1] if self._r >= 1 else ()

    def lines(self) -> tuple[int, ...]:
        return self._flats[2] if self._r >= 2 else ()

    def planes(self) -> tuple[int, ...]:
        return self._flats[3] if self._r >= 3 else ()

    @property
    def loops(self) -> int:
        return self._flats[0][0]

    def covers(self, F: int) -> tuple[int, ...]:
        """Flats of rank ``r(F) + 1`` containing the flat ``F``."""
        if self._covers is None:
            cov: dict[int, list[int]] = {G: [] for G in self._flat_rank}
            for k in range(self._r):
                for G in self._flats[k + 1]:
                    for F2 in self._flats[k]:
                        if F2 & G == F2:
                            cov[F2].append(G)
            self._covers = {G: tuple(v) for G, v in cov.items()}
        return self._covers[F]

    def containing(self, X: int, k: int) -> int:
        """Bitset over positions in ``flats(k)`` of the flats containing ``X``."""
        cand = self._all[k]
        inc = self._inc[k]
        while X and cand:
            low = X & -X
            cand &= inc[low.bit_length() - 1]
            X ^= low
        return cand

    def position(self, F: int) -> int:
        """Index of the flat ``F`` within ``flats(flat_rank(F))``."""
        return self._pos[F]

    def flats_above(self, F: int) -> list[int]:
        """All flats containing ``F`` (including ``F`` if it is a flat)."""
        k0 = self._lookup(F)[0]
        out = []
        for k in range(k0, self._r + 1):
            level = self._flats[k]
            out.extend(level[pos] for pos in bits(self.containing(F, k)))
        return out

    def is_independent(self, X) -> bool:
        X = self.mask(X)
        return self.rank(X) == popcount(X)

    def bases(self) -> list[int]:
        return [
            mask_of(c)
            for c in itertools.combinations(range(self._n), self._r)
            if self.rank(mask_of(c)) == self._r
        ]

    # -- misc ---------------------------------------------------------------
    def flat_counts(self) -> list[int]:
        return [len(level) for level in self._flats]

    def fresh_label(self, prefix: str = "_p") -> str:
        k = 1
        while f"{prefix}{k}" in self._index:
            k += 1
        return f"{prefix}{k}"

    def relabel(self, mapping: dict[str, str], name: str | None = None) -> "Matroid":
        labels = [mapping.get(lab, lab) for lab in self._labels]
        return Matroid(labels, self._flats, name=name if name is not None else self.name)

    def flat_set(self) -> set[tuple[int, frozenset[str]]]:
        """Flats as (rank, label set) pairs; independent of element order."""
        return {
            (k, frozenset(self.labels_of(F)))
            for k, level in enumerate(self._flats)
            for F in level
        }

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matroid):
            return NotImplemented
        return self._labels == other._labels and self._flats == other._flats

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._labels, self._flats))
        return self._hash

    def __repr__(self) -> str:
        tag = f" {self.name!r}" if self.name else ""
        return f"<Matroid{tag} rank {self._r} on {self._n} elements>"

    # -- alternative constructors --------------------------------------------
    @classmethod
    def from_rank_function(cls, labels, rank_fn: Callable[[int], int], name=None) -> "Matroid":
        labels = tuple(labels)
        return cls(labels, flats_from_rank(len(labels), rank_fn), name=name)

    @classmethod
    def from_bases(cls, labels, bases: Iterable[int], name=None) -> "Matroid":
        bases = sorted(set(bases))
        if not bases:
            raise NotAMatroid("a matroid has at least one basis")

        def rk(X: int) -> int:
            return max(popcount(X & B) for B in bases)

        return cls.from_rank_function(labels, _memo(rk), name=name)

    def to_text(self) -> str:
        return serialize_matroid(self)


def _memo(fn: Callable[[int], int]) -> Callable[[int], int]:
    table: dict[int, int] = {}

    def wrapped(X: int) -> int:
        v = table.get(X)
        if v is None:
            v = table[X] = fn(X)
        return v

    return wrapped


def closure_from_rank(n: int, rank_fn: Callable[[int], int], S: int) -> int:
    rs = rank_fn(S)
    out = S
    for y in range(n):
        b = 1 << y
        if not S & b and rank_fn(S | b) == rs:
            out |= b
    return out


def flats_from_rank(n: int, rank_fn: Callable[[int], int]) -> list[list[int]]:
    """Enumerate flats level by level via closures of covers."""
    full = (1 << n) - 1
    bottom = closure_from_rank(n, rank_fn, 0)
    levels = [[bottom]]
    while levels[-1] != [full]:
        nxt: set[int] = set()
        for F in levels[-1]:
            covered = F
            for x in range(n):
                b = 1 << x
                if covered & b:
                    continue
                G = closure_from_rank(n, rank_fn, F | b)
                nxt.add(G)
                covered |= G
        if not nxt:
            raise NotAMatroid("closure iteration stalled before reaching the ground set")
        levels.append(sorted(nxt, key=mask_key))
        if len(levels) > n + 1:
            raise NotAMatroid("rank function exceeds the size of the ground set")
    return levels


# -- rank tables -------------------------------------------------------------
class RankTable:
    """Explicit rank function on every subset (interchange and oracle form).

    It is not required to satisfy the axioms; :meth:`check_axioms` says
    whether it does.  This is the form used to encode would-be matroids.
    """

    MAX_ELEMENTS = 20

    def __init__(self, labels: Sequence[str], values: Sequence[int], name: str | None = None):
        labels = tuple(labels)
        _check_labels(labels)
        if len(labels) > self.MAX_ELEMENTS:
            raise TooLarge(f"rank tables are limited to {self.MAX_ELEMENTS} elements")
        if len(values) != 1 << len(labels):
            raise ParseError("rank table must list every subset")
        self.labels = labels
        self.n = len(labels)
        self.values = np.asarray(values, dtype=np.int64)
        self.name = name
        self._index = {lab: i for i, lab in enumerate(labels)}

    @classmethod
    def from_function(cls, labels, fn: Callable[[int], int], name=None) -> "RankTable":
        labels = tuple(labels)
        return cls(labels, [fn(X) for X in range(1 << len(labels))], name=name)

    @classmethod
    def from_matroid(cls, M: Matroid) -> "RankTable":
        return cls.from_function(M.labels, M.rank, name=M.name)

    def mask(self, X) -> int:
        if isinstance(X, (int, np.integer)):
            return int(X)
        if isinstance(X, str):
            X = X.split()
        return mask_of(self._index[lab] for lab in X)

    def labels_of(self, mask: int) -> tuple[str, ...]:
        return tuple(self.labels[i] for i in bits(mask))

    def rank(self, X=None) -> int:
        if X is None:
            return int(self.values[-1])
        return int(self.values[self.mask(X)])

    def closure(self, X) -> int:
        return closure_from_rank(self.n, lambda S: int(self.values[S]), self.mask(X))

    def lines(self) -> list[int]:
        """Closed subsets of rank 2 (closure computed from the table)."""
        out = []
        for X in range(1 << self.n):
            if self.values[X] == 2 and self.closure(X) == X:
                out.append(X)
        return sorted(out, key=mask_key)

    def check_axioms(self) -> "AxiomReport":
        return check_rank_axioms(self.n, lambda S: int(self.values[S]), table=self.values)

    def to_matroid(self, name=None) -> Matroid:
        report = self.check_axioms()
        if not report.ok:
            raise NotAMatroid(report.message, pair=_label_pair(self, report.violation))
        return Matroid.from_rank_function(self.labels, lambda S: int(self.values[S]), name=name or self.name)


def _label_pair(obj, violation):
    if violation is None:
        return None
    return tuple(obj.labels_of(v) for v in violation)


# -- axiom checking ------------------------------------------------------------
@dataclass
class AxiomReport:
    ok: bool
    mode: str  # "exhaustive" or "sampled"
    checked: int
    violation: tuple[int, int] | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _full_table(n: int, rank_fn: Callable[[int], int]) -> np.ndarray:
    return np.fromiter((rank_fn(X) for X in range(1 << n)), dtype=np.int64, count=1 << n)


def check_rank_axioms(
    n: int,
    rank_fn: Callable[[int], int],
    *,
    exhaustive_limit: int = EXHAUSTIVE_AXIOM_LIMIT,
    samples: int = DEFAULT_AXIOM_SAMPLES,
    seed: int = 1,
    table: np.ndarray | None = None,
) -> AxiomReport:
    """Check R1 (0 <= r(X) <= |X|), R2 (monotone) and R3 (submodular).

    Every pair of subsets is checked when ``n <= exhaustive_limit`` (or a
    full table is supplied); otherwise ``samples`` seeded random pairs.
    """
    if table is not None or n <= exhaustive_limit:
        r = table if table is not None else _full_table(n, rank_fn)
        size = 1 << n
        idx = np.arange(size, dtype=np.int64)
        card = np.array([popcount(X) for X in range(size)], dtype=np.int64)
        bad = np.nonzero((r < 0) | (r > card))[0]
        if bad.size:
            X = int(bad[0])
            return AxiomReport(False, "exhaustive", size, (X, X), f"R1 fails at mask {X}")
        # chunk rows to bound memory at n=12 and above
        step = max(1, (1 << 20) >> n)
        checked = size
        for start in range(0, size, step):
            rows = idx[start : start + step, None]
            union = rows | idx[None, :]
            inter = rows & idx[None, :]
            rX = r[start : start + step, None]
            sub = rX + r[None, :] - r[union] - r[inter]
            bad = np.argwhere(sub < 0)
            if bad.size:
                i, j = bad[0]
                return AxiomReport(
                    False, "exhaustive", checked, (int(start + i), int(j)),
                    f"R3 fails for masks {int(start + i)}, {int(j)}",
                )
            sub_mask = inter == rows
            mono = sub_mask & (rX > r[None, :])
            bad = np.argwhere(mono)
            if bad.size:
                i, j = bad[0]
                return AxiomReport(
                    False, "exhaustive", checked, (int(start + i), int(j)),
                    f"R2 fails for masks {int(start + i)} <= {int(j)}",
                )
            checked += rows.shape[0] * size
        return AxiomReport(True, "exhaustive", checked)

    rng = random.Random(seed)
    full = (1 << n) - 1
    small = min(n, 12)
    for t in range(samples):
        if t % 2:
            X = rng.getrandbits(n)
            Y = rng.getrandbits(n)
        else:
            # small sets hit the interesting part of the lattice
            X = mask_of(rng.sample(range(n), rng.randint(0, small)))
            Y = mask_of(rng.sample(range(n), rng.randint(0, small)))
        X &= full
        Y &= full
        rX, rY = rank_fn(X), rank_fn(Y)
        rU, rI = rank_fn(X | Y), rank_fn(X & Y)
        if not 0 <= rX <= popcount(X):
            return AxiomReport(False, "sampled", t, (X, X), f"R1 fails at mask {X}")
        if rI > rX or rX > rU:
            return AxiomReport(False, "sampled", t, (X & Y, X), "R2 fails")
        if rX + rY < rU + rI:
            return AxiomReport(False, "sampled", t, (X, Y), "R3 fails")
    return AxiomReport(True, "sampled", samples)


def check_matroid_axioms(M: Matroid, **kw) -> AxiomReport:
    return check_rank_axioms(M.n, M.rank, **kw)


def check_flat_axioms(M: Matroid) -> str | None:
    """Lattice-level invariants; returns a description of the first failure."""
    flats = M.all_flats()
    flatset = set(flats)
    for i, F in enumerate(flats):
        for G in flats[i + 1 :]:
            if F & G not in flatset:
                return f"intersection of {M.fmt(F)} and {M.fmt(G)} is not a flat"
    full = M.ground
    for k in range(M.rank()):
        for F in M.flats(k):
            seen = 0
            for G in M.covers(F):
                part = G & ~F
                if part & seen:
                    return f"covers of {M.fmt(F)} overlap"
                seen |= part
            if seen != full & ~F:
                return f"covers of {M.fmt(F)} do not partition the complement"
    for k in range(M.rank() + 1):
        for F in M.flats(k):
            if M.rank(F) != k or M.closure(F) != F:
                return f"flat {M.fmt(F)} has inconsistent rank"
    return None


# -- minors ----------------------------------------------------------------------
def minor(M: Matroid, delete=0, contract=0, name: str | None = None) -> Matroid:
    """``M / contract \\ delete`` with flats computed structurally.

    Flats of the minor are the traces ``F ∩ S`` of flats ``F ⊇ contract``,
    where ``S`` is the surviving ground set.
    """
    D = M.mask(delete)
    C = M.mask(contract)
    if D & C:
        raise OverlapError("delete and contract sets overlap")
    S = M.ground & ~(D | C)
    keep = bits(S)
    remap = {old: new for new, old in enumerate(keep)}
    rC = M.rank(C)
    top = M.rank(S | C) - rC
    levels: list[set[int]] = [set() for _ in range(top + 1)]
    for F in M.all_flats():
        if F & C != C:
            continue
        trace = F & S
        k = M.rank(trace | C) - rC
        new = 0
        for i in bits(trace):
            new |= 1 << remap[i]
        levels[k].add(new)
    labels = [M.labels[i] for i in keep]
    return Matroid(labels, levels, name=name)


def restrict(M: Matroid, S, name: str | None = None) -> Matroid:
    S = M.mask(S)
    return minor(M, delete=M.ground & ~S, name=name)


def delete(M: Matroid, X, name: str | None = None) -> Matroid:
    return minor(M, delete=X, name=name)


def contract(M: Matroid, X, name: str | None = None) -> Matroid:
    return minor(M, contract=X, name=name)


def restriction_by_labels(M: Matroid, labels: Iterable[str]) -> Matroid:
    """Restriction to ``labels`` keeping ``M``'s element order."""
    want = set(labels)
    return restrict(M, [lab for lab in M.labels if lab in want])


def same_matroid(A: Matroid, B: Matroid) -> bool:
    """Equal up to element order: same labels, same flats with same ranks."""
    return set(A.labels) == set(B.labels) and A.flat_set() == B.flat_set()


def direct_sum(A: Matroid, B: Matroid, name=None) -> Matroid:
    if set(A.labels) & set(B.labels):
        raise LabelClash("direct sum needs disjoint ground sets")
    shift = A.n
    levels: list[set[int]] = [set() for _ in range(A.rank() + B.rank() + 1)]
    for F in A.all_flats():
        for G in B.all_flats():
            levels[A.flat_rank(F) + B.flat_rank(G)].add(F | (G << shift))
    return Matroid(A.labels + B.labels, levels, name=name)


# -- isomorphism ---------------------------------------------------------------
def _element_signature(M: Matroid, i: int) -> tuple:
    b = 1 << i
    sig = []
    for k in range(M.rank() + 1):
        sig.append(tuple(sorted(popcount(F) for F in M.flats(k) if F & b)))
    return tuple(sig)


def are_isomorphic(M1: Matroid, M2: Matroid, bound: int = DEFAULT_ISO_BOUND) -> dict[str, str] | None:
    """Return a flat-preserving bijection ``labels(M1) -> labels(M2)`` or None.

    Backtracking over elements ordered by signature rarity; a partial map is
    pruned as soon as it changes the rank of the trace of some flat on the
    assigned elements.
    """
    if M1.n != M2.n or M1.rank() != M2.rank() or M1.flat_counts() != M2.flat_counts():
        return None
    if max(M1.n, M2.n) > bound:
        raise TooLarge(f"isomorphism search is limited to {bound} elements")
    n = M1.n
    sig1 = [_element_signature(M1, i) for i in range(n)]
    sig2 = [_element_signature(M2, i) for i in range(n)]
    if sorted(sig1) != sorted(sig2):
        return None
    classes: dict[tuple, list[int]] = {}
    for j, s in enumerate(sig2):
        classes.setdefault(s, []).append(j)

    # rare signature classes first, then elements sharing lines with placed ones
    order: list[int] = []
    remaining = sorted(range(n), key=lambda i: (len(classes[sig1[i]]), i))
    while remaining:
        placed = mask_of(order)
        best = max(
            remaining,
            key=lambda i: (-len(classes[sig1[i]]), sum(1 for L in M1.lines() if L >> i & 1 and L & placed), -i),
        )
        order.append(best)
        remaining.remove(best)

    flats_with = [[F for F in M1.all_flats() if F >> i & 1 and F != M1.ground] for i in range(n)]
    image = [0] * n
    used = [False] * n

    def image_of(mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= 1 << image[i]
        return out

    flats2 = set(M2.all_flats())

    def search(depth: int, assigned: int) -> bool:
        if depth == n:
            return all(image_of(F) in flats2 and M2.flat_rank(image_of(F)) == M1.flat_rank(F) for F in M1.all_flats())
        x = order[depth]
        now = assigned | (1 << x)
        for y in classes[sig1[x]]:
            if used[y]:
                continue
            image[x] = y
            ok = True
            for F in flats_with[x]:
                part = F & now
                if M2.rank(image_of(part)) != M1.rank(part):
                    ok = False
                    break
            if ok:
                used[y] = True
                if search(depth + 1, now):
                    return True
                used[y] = False
        return False

    if search(0, 0):
        return {M1.labels[i]: M2.labels[image[i]] for i in range(n)}
    return None


# -- file format --------------------------------------------------------------
REPRESENTATIONS = ("bases", "nonbases", "circuits", "flats", "ranktable")


def _split_record(tokens: list[str], index: dict[str, int]) -> list[str]:
    # "abcd" is accepted for a b c d when every label is one character
    if len(tokens) == 1 and tokens[0] not in index and all(len(k) == 1 for k in index):
        return list(tokens[0])
    return tokens


def _record_mask(tokens: list[str], index: dict[str, int], lineno: int) -> int:
    m = 0
    for t in _split_record(tokens, index):
        if t in ("-", "{}", "∅"):
            continue
        if t not in index:
            raise ParseError(f"line {lineno}: unknown element {t!r}")
        m |= 1 << index[t]
    return m


def parse_matroid(text: str) -> Matroid:
    """Parse the line-oriented matroid file format (see README)."""
    header: dict[str, str] = {}
    records: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key = key.strip().lower()
        if sep and key in ("name", "elements", "rank", "representation") and "representation" not in header:
            if key in header:
                raise ParseError(f"line {lineno}: duplicate header {key!r}")
            header[key] = rest.strip()
            continue
        if "representation" not in header:
            raise ParseError(f"line {lineno}: record before 'representation:' header")
        records.append((lineno, line))

    if "elements" not in header:
        raise ParseError("missing 'elements:' header")
    if "representation" not in header:
        raise ParseError("missing 'representation:' header")
    labels = header["elements"].split()
    _check_labels(labels)
    index = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)
    rep = header["representation"].lower()
    if rep not in REPRESENTATIONS:
        raise ParseError(f"unknown representation {rep!r}")
    declared = None
    if "rank" in header:
        try:
            declared = int(header["rank"])
        except ValueError:
            raise ParseError(f"rank header is not an integer: {header['rank']!r}") from None
    name = header.get("name")

    if rep == "flats":
        levels: dict[int, list[int]] = {}
        for lineno, line in records:
            k, sep, rest = line.partition(":")
            if not sep:
                raise ParseError(f"line {lineno}: flats records look like 'k: e1 e2 ...'")
            try:
                k = int(k)
            except ValueError:
                raise ParseError(f"line {lineno}: bad rank {k!r}") from None
            levels.setdefault(k, []).append(_record_mask(rest.split(), index, lineno))
        if not levels:
            raise ParseError("no flats given")
        top = max(levels)
        if sorted(levels) != list(range(top + 1)):
            raise NotAMatroid("flats must be given for every rank 0..r")
        M = Matroid(labels, [levels[k] for k in range(top + 1)], name=name)
        problem = check_flat_axioms(M)
        if problem:
            raise NotAMatroid(problem)
    elif rep == "ranktable":
        values: dict[int, int] = {}
        for lineno, line in records:
            lhs, sep, rhs = line.partition("=")
            if not sep:
                raise ParseError(f"line {lineno}: rank table lines look like 'a b = 2'")
            X = _record_mask(lhs.split(), index, lineno)
            try:
                values[X] = int(rhs)
            except ValueError:
                raise ParseError(f"line {lineno}: bad rank value {rhs.strip()!r}") from None
        if len(values) != 1 << n:
            raise ParseError(f"rank table lists {len(values)} of {1 << n} subsets")
        table = RankTable(labels, [values[X] for X in range(1 << n)], name=name)
        M = table.to_matroid()
    else:
        sets = [_record_mask(line.split(), index, lineno) for lineno, line in records]
        if rep == "bases":
            M = _from_bases_checked(labels, sets, name)
        elif rep == "nonbases":
            r = declared
            if r is None:
                if not sets:
                    raise ParseError("nonbases without 'rank:' need at least one record")
                r = popcount(sets[0])
            bad = [S for S in sets if popcount(S) != r]
            if bad:
                raise NotAMatroid("nonbasis of the wrong size", pair=(tuple(labels[i] for i in bits(bad[0])),))
            non = set(sets)
            bases = [mask_of(c) for c in itertools.combinations(range(n), r) if mask_of(c) not in non]
            M = _from_bases_checked(labels, bases, name)
        else:
            M = _from_circuits_checked(labels, sets, name)
    if declared is not None and declared != M.rank():
        raise NotAMatroid(f"declared rank {declared} but the data has rank {M.rank()}")
    return M


def _from_bases_checked(labels, bases: list[int], name) -> Matroid:
    bases = sorted(set(bases))
    if not bases:
        raise NotAMatroid("no bases given")
    sizes = {popcount(B) for B in bases}
    if len(sizes) != 1:
        raise NotAMatroid("bases of different sizes")
    bset = set(bases)
    for B1 in bases:
        for B2 in bases:
            for x in bits(B1 & ~B2):
                if not any((B1 & ~(1 << x)) | (1 << y) in bset for y in bits(B2 & ~B1)):
                    pair = (tuple(labels[i] for i in bits(B1)), tuple(labels[i] for i in bits(B2)))
                    raise NotAMatroid("basis exchange fails", pair=pair)
    return Matroid.from_bases(labels, bases, name=name)


def _from_circuits_checked(labels, circuits: list[int], name) -> Matroid:
    circuits = sorted(set(circuits))
    lab = lambda m: tuple(labels[i] for i in bits(m))  # noqa: E731
    if 0 in circuits:
        raise NotAMatroid("the empty set is not a circuit")
    for C1 in circuits:
        for C2 in circuits:
            if C1 != C2 and C1 & C2 == C1:
                raise NotAMatroid("a circuit properly contains another", pair=(lab(C1), lab(C2)))
    for i, C1 in enumerate(circuits):
        for C2 in circuits[i + 1 :]:
            for e in bits(C1 & C2):
                rest = (C1 | C2) & ~(1 << e)
                if not any(C & rest == C for C in circuits):
                    raise NotAMatroid("circuit elimination fails", pair=(lab(C1), lab(C2)))
    n = len(labels)

    def rk(X: int) -> int:
        indep = 0
        for x in bits(X):
            cand = indep | (1 << x)
            if not any(C & cand == C for C in circuits):
                indep = cand
        return popcount(indep)

    return Matroid.from_rank_function(labels, _memo(rk), name=name)


def serialize_matroid(M: Matroid) -> str:
    lines = []
    if M.name:
        lines.append(f"name: {M.name}")
    lines.append("elements: " + " ".join(M.labels))
    lines.append(f"rank: {M.rank()}")
    lines.append("representation: flats")
    for k, level in enumerate(M.flats_by_rank):
        for F in level:
            body = " ".join(M.labels_of(F))
            lines.append(f"{k}: {body}".rstrip())
    return "\n".join(lines) + "\n"


def load_matroid(path) -> Matroid:
    with open(path, encoding="utf-8") as fh:
        return parse_matroid(fh.read())
