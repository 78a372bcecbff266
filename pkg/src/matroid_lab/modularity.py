"""Modular defect, hypermodularity, coplanar line configurations and the
bundle condition."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .core import Matroid, RankTable, bits, mask_key, popcount
from .errors import PreconditionFailed, TooLarge

DEFAULT_QUADRUPLE_CAP = 10**7

Geometry = Union[Matroid, RankTable]


@dataclass(frozen=True)
class FlatPair:
    X: int
    Y: int
    defect: int

    def labels(self, M) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return M.labels_of(self.X), M.labels_of(self.Y)


@dataclass
class PropertyResult:
    """Truth value plus the first witness found when it is false."""

    holds: bool
    witness: FlatPair | None = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass
class LinePartition:
    lines: list[int]
    origin: tuple[int, int]
    pstar: int
    delta: list[int] = field(default_factory=list)
    sigma: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class EscherViolation:
    l1: int
    l2: int
    l3: int
    point: int
    planes: tuple[int, int] = (0, 0)
    triples: int = 1


def modular_defect(M: Geometry, X, Y) -> int:
    X, Y = M.mask(X), M.mask(Y)
    return M.rank(X) + M.rank(Y) - M.rank(X | Y) - M.rank(X & Y)


def _flat_pairs(M: Matroid, flats: list[int]):
    for i, F in enumerate(flats):
        for G in flats[i + 1 :]:
            if F & G == F or F & G == G:
                continue
            yield F, G


def _proper_flats(M: Matroid) -> list[int]:
    return [F for k in range(1, M.rank()) for F in M.flats(k)]


def is_modular(M: Matroid) -> PropertyResult:
    for F, G in _flat_pairs(M, _proper_flats(M)):
        d = modular_defect(M, F, G)
        if d:
            return PropertyResult(False, FlatPair(F, G, d))
    return PropertyResult(True)


def is_hypermodular(M: Matroid) -> PropertyResult:
    if M.rank() < 2:
        return PropertyResult(True)
    for F, G in _flat_pairs(M, list(M.hyperplanes())):
        d = modular_defect(M, F, G)
        if d:
            return PropertyResult(False, FlatPair(F, G, d))
    return PropertyResult(True)


def count_nonmodular_hyperplane_pairs(M: Matroid) -> int:
    """Number of hyperplane pairs that are not modular.

    Two distinct hyperplanes are modular exactly when they meet in a flat of
    rank ``r − 2``, and then that flat is their intersection; so the modular
    pairs are counted coline by coline.
    """
    r = M.rank()
    if r < 3:
        return 0
    h = len(M.hyperplanes())
    modular = 0
    for K in M.flats(r - 2):
        d = popcount(M.containing(K, r - 1))
        modular += d * (d - 1) // 2
    return h * (h - 1) // 2 - modular


def coplanar(M: Geometry, l1: int, l2: int) -> bool:
    return M.rank(l1 | l2) <= 3


def coplanar_disjoint_line_pairs(M: Matroid) -> list[FlatPair]:
    if M.rank() < 3:
        return []
    lines = list(M.lines())
    out = []
    for i, l1 in enumerate(lines):
        for l2 in lines[i + 1 :]:
            if l1 & l2 == 0 and M.rank(l1 | l2) == 3:
                out.append(FlatPair(l1, l2, 1))
    return out


def _lines_of(M: Geometry) -> list[int]:
    return list(M.lines())


def check_escher(M: Geometry) -> list[EscherViolation]:
    """Pairwise coplanar lines ``l1, l2, l3``, not all in one plane, where
    ``l1`` and ``l2`` meet in a point missing from ``l3``.

    Accepts raw :class:`RankTable` objects (their lines are the closed
    rank-2 sets).  One entry is reported per pair of planes
    ``(l1 ∨ l3, l2 ∨ l3)``: the three non-collinear points those planes
    share can each play the role of the meeting point, so a single bad
    configuration shows up as several triples.  The entry keeps the first
    triple in scan order and the number of triples found.
    """
    lines = _lines_of(M)
    if not lines:
        return []
    rank = M.rank
    copl = []
    for i, a in enumerate(lines):
        row = 0
        for j, b in enumerate(lines):
            if i != j and rank(a | b) == 3:
                row |= 1 << j
        copl.append(row)
    found: dict[tuple[int, int], list] = {}
    for i, l1 in enumerate(lines):
        for j in range(i + 1, len(lines)):
            l2 = lines[j]
            if not copl[i] >> j & 1:
                continue
            point = l1 & l2
            if not point or rank(point) != 1:
                continue
            for k in bits(copl[i] & copl[j]):
                l3 = lines[k]
                if point & l3 == point or rank(l1 | l2 | l3) < 4:
                    continue
                p1, p2 = M.closure(l1 | l3), M.closure(l2 | l3)
                key = (min(p1, p2), max(p1, p2))
                if key in found:
                    found[key][1] += 1
                else:
                    found[key] = [(l1, l2, l3, point), 1]
    return [
        EscherViolation(*triple, planes=key, triples=count)
        for key, (triple, count) in sorted(found.items(), key=lambda kv: (mask_key(kv[0][0]), mask_key(kv[0][1])))
    ]


def _require_rank4_hypermodular(M: Matroid) -> None:
    if M.rank() != 4:
        raise PreconditionFailed(f"needs a rank-4 matroid, got rank {M.rank()}")
    hm = is_hypermodular(M)
    if not hm:
        raise PreconditionFailed(
            f"not hypermodular: hyperplanes {M.fmt(hm.witness.X)} and {M.fmt(hm.witness.Y)} are not modular"
        )


def _require_disjoint_coplanar(M: Matroid, l1: int, l2: int) -> None:
    if not (M.is_flat(l1) and M.is_flat(l2) and M.rank(l1) == 2 and M.rank(l2) == 2):
        raise PreconditionFailed("both arguments must be lines")
    if l1 & l2:
        raise PreconditionFailed(f"lines {M.fmt(l1)} and {M.fmt(l2)} intersect")
    if M.rank(l1 | l2) != 3:
        raise PreconditionFailed(f"lines {M.fmt(l1)} and {M.fmt(l2)} are not coplanar")


def line_partition(M: Matroid, l1, l2, tie_break: int | None = None) -> LinePartition:
    """Partition the ground set into ``l1``, ``l2`` and lines coplanar with both.

    Off the plane ``e = cl(l1 ∪ l2)`` the lines are
    ``cl(l1 ∪ x) ∩ cl(l2 ∪ x)``; inside ``e`` they are ``e ∩ cl(l* ∪ x)`` for
    one fixed off-plane line ``l*`` (index ``tie_break`` into the sorted
    off-plane lines, default the least).
    """
    from .cuts import generate_cut

    l1, l2 = M.mask(l1), M.mask(l2)
    _require_rank4_hypermodular(M)
    _require_disjoint_coplanar(M, l1, l2)
    e = M.closure(l1 | l2)
    delta = set()
    for x in bits(M.ground & ~e):
        b = 1 << x
        delta.add(M.closure(l1 | b) & M.closure(l2 | b))
    delta = sorted(delta, key=mask_key)
    pick = 0 if tie_break is None else tie_break
    if not 0 <= pick < len(delta):
        raise PreconditionFailed(f"tie_break {tie_break} outside 0..{len(delta) - 1}")
    pstar = delta[pick]
    sigma = set()
    for x in bits(e & ~(l1 | l2)):
        sigma.add(e & M.closure(pstar | (1 << x)))
    sigma = sorted(sigma, key=mask_key)
    lines = [l1, l2] + sigma + delta

    union = 0
    for L in lines:
        if M.rank(L) != 2 or not M.is_flat(L):
            raise PreconditionFailed(f"{M.fmt(L)} is not a line")
        if union & L:
            raise PreconditionFailed(f"{M.fmt(L)} overlaps another partition line")
        union |= L
    if union != M.ground:
        raise PreconditionFailed("partition lines do not cover the ground set")
    for L in lines[2:]:
        if not (coplanar(M, L, l1) and coplanar(M, L, l2)):
            raise PreconditionFailed(f"{M.fmt(L)} is not coplanar with both origin lines")
    cut = generate_cut(M, [l1, l2])
    missing = [L for L in lines if L not in cut]
    if missing:
        raise PreconditionFailed(f"{M.fmt(missing[0])} is not in the generated modular cut")
    return LinePartition(lines, (l1, l2), pstar, delta, sigma)


def bundle_violations(M: Matroid, cap: int = DEFAULT_QUADRUPLE_CAP) -> list[tuple[int, int, int, int]]:
    """Quadruples of pairwise disjoint lines, no three coplanar, with exactly
    five coplanar pairs.

    Each violation is returned once as ``(l1, l2, l3, l4)`` where ``(l3, l4)``
    is the unique non-coplanar pair and ``l1 < l2``, ``l3 < l4``.
    """
    if M.rank() < 4:
        return []
    lines = list(M.lines())
    nl = len(lines)
    cd = [0] * nl  # disjoint and coplanar
    dn = [0] * nl  # disjoint, not coplanar
    for i, a in enumerate(lines):
        for j in range(i + 1, nl):
            b = lines[j]
            if a & b:
                continue
            if M.rank(a | b) == 3:
                cd[i] |= 1 << j
                cd[j] |= 1 << i
            else:
                dn[i] |= 1 << j
                dn[j] |= 1 << i

    def three_coplanar(a, b, c) -> bool:
        return M.rank(a | b | c) <= 3

    out = []
    examined = 0
    for k3 in range(nl):
        for k4 in bits(dn[k3] >> (k3 + 1) << (k3 + 1)):
            cand = cd[k3] & cd[k4]
            for i in bits(cand):
                for j in bits(cand & cd[i] & ~((1 << (i + 1)) - 1)):
                    examined += 1
                    if examined > cap:
                        raise TooLarge(f"bundle scan exceeded {cap} quadruples")
                    a, b, c, d = lines[i], lines[j], lines[k3], lines[k4]
                    if three_coplanar(a, b, c) or three_coplanar(a, b, d):
                        continue
                    out.append((a, b, c, d))
    return out


def vamos_restriction_search(M: Matroid, l1, l2, *, check_preconditions: bool = True):
    """Lines ``(l3, l4)`` completing ``l1, l2`` to a Vámos configuration.

    Returns None when the pair is intersectable.  The scan is over all
    candidate pairs in sorted order; the first verified pair is returned and
    it is one of possibly many.
    """
    from .cuts import is_intersectable

    l1, l2 = M.mask(l1), M.mask(l2)
    if check_preconditions:
        _require_rank4_hypermodular(M)
    _require_disjoint_coplanar(M, l1, l2)
    if is_intersectable(M, l1, l2):
        return None
    e = M.closure(l1 | l2)
    cands = [
        L
        for L in M.lines()
        if not L & (l1 | l2) and L & e != L and coplanar(M, L, l1) and coplanar(M, L, l2)
    ]
    for i, l3 in enumerate(cands):
        for l4 in cands[i + 1 :]:
            if l3 & l4 or coplanar(M, l3, l4):
                continue
            quad = (l1, l2, l3, l4)
            if any(
                M.rank(quad[a] | quad[b] | quad[c]) <= 3
                for a, b, c in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))
            ):
                continue
            return l3, l4
    return None


def vamos_points(M: Matroid, lines: tuple[int, ...]) -> int:
    """Two points from each of four lines, for a restriction check."""
    out = 0
    for L in lines:
        out |= sum(1 << i for i in bits(L)[:2])
    return out


def hochstaettler_holds(M: Geometry, X: int, Y: int, Z: int) -> bool:
    """For a modular pair ``(X, Y)`` and ``Z ⊆ X - Y``, ``(X - Z, Y)`` is modular."""
    if modular_defect(M, X, Y):
        return True
    if Z & ~(X & ~Y):
        raise ValueError("Z must lie inside X - Y")
    return modular_defect(M, X & ~Z, Y) == 0


def analyze(M: Matroid, cap: int = DEFAULT_QUADRUPLE_CAP) -> dict:
    """Summary used by the ``analyze`` CLI command."""
    mod = is_modular(M)
    hyp = is_hypermodular(M)
    bundle = bundle_violations(M, cap)
    pairs = coplanar_disjoint_line_pairs(M)
    escher = check_escher(M)
    lab = M.labels_of
    return {
        "name": M.name,
        "elements": M.n,
        "rank": M.rank(),
        "flats_per_rank": M.flat_counts(),
        "is_modular": mod.holds,
        "modular_witness": None if mod else [lab(mod.witness.X), lab(mod.witness.Y), mod.witness.defect],
        "is_hypermodular": hyp.holds,
        "hypermodular_witness": None if hyp else [lab(hyp.witness.X), lab(hyp.witness.Y), hyp.witness.defect],
        "bundle_condition": not bundle,
        "bundle_violations": [[lab(L) for L in q] for q in bundle[:5]],
        "first_disjoint_coplanar_lines": [lab(pairs[0].X), lab(pairs[0].Y)] if pairs else None,
        "escher_violations": [[lab(v.l1), lab(v.l2), lab(v.l3)] for v in escher],
    }
