"""Named matroids with fixed, documented labelings.

* ``uniform(r, n)``: elements ``a, b, c, ...`` (``e1 ... en`` beyond 26).
* ``free(n)``: the free matroid ``U_{n,n}``.
* ``vamos``: elements ``a..h``; the four defining lines are ``ab, cd, ef, gh``
  and the five nonbases are every union of two of them except ``efgh``.
* ``pg3(q)``: points of PG(3, q) labelled by their normalized homogeneous
  coordinates (first non-zero coordinate equal to 1), e.g. ``"0101"``.
  For q = 4 the field elements 0, 1, w, w^2 are written ``0 1 2 3``.
* ``u36-erection``: the Vámos-type erection over the disjoint lines
  ``ab`` and ``cd`` of ``U_{3,6}``.
"""

from __future__ import annotations

import itertools
import string

from .core import Matroid, RankTable, delete, mask_of
from .errors import UnknownFamily, UnsupportedParam

FAMILIES = ("uniform", "free", "vamos", "pg3", "u36-erection")


def _letters(n: int) -> list[str]:
    if n <= 26:
        return list(string.ascii_lowercase[:n])
    return [f"e{i}" for i in range(1, n + 1)]


def uniform(r: int, n: int) -> Matroid:
    if not 0 <= r <= n:
        raise UnsupportedParam(f"uniform matroid needs 0 <= r <= n, got r={r}, n={n}")
    levels = [[mask_of(c) for c in itertools.combinations(range(n), k)] for k in range(r)]
    levels.append([(1 << n) - 1])
    return Matroid(_letters(n), levels, name=f"U{r},{n}")


def free(n: int) -> Matroid:
    M = uniform(n, n)
    M.name = f"free{n}"
    return M


VAMOS_LINES = ("ab", "cd", "ef", "gh")
VAMOS_NONBASES = ("abcd", "abef", "abgh", "cdef", "cdgh")


def vamos() -> Matroid:
    labels = list("abcdefgh")
    non = {mask_of("abcdefgh".index(c) for c in s) for s in VAMOS_NONBASES}
    bases = [m for m in (mask_of(c) for c in itertools.combinations(range(8), 4)) if m not in non]
    return Matroid.from_bases(labels, bases, name="V8")


# -- finite fields and PG(3, q) ------------------------------------------------
class GF:
    """Arithmetic in GF(q) for q in {2, 3, 4}."""

    def __init__(self, q: int):
        if q not in (2, 3, 4):
            raise UnsupportedParam(f"pg3 supports q in (2, 3, 4), got {q}")
        self.q = q
        if q == 4:
            # elements are polynomials over GF(2) mod x^2 + x + 1, encoded 0..3
            self.add = [[a ^ b for b in range(4)] for a in range(4)]
            mul = [[0] * 4 for _ in range(4)]
            for a in range(4):
                for b in range(4):
                    p = 0
                    for i in range(2):
                        if b >> i & 1:
                            p ^= a << i
                    if p & 4:
                        p ^= 0b111
                    mul[a][b] = p
            self.mul = mul
        else:
            self.add = [[(a + b) % q for b in range(q)] for a in range(q)]
            self.mul = [[(a * b) % q for b in range(q)] for a in range(q)]

    def dot(self, u, v) -> int:
        s = 0
        for a, b in zip(u, v):
            s = self.add[s][self.mul[a][b]]
        return s


def projective_points(q: int, dim: int = 4) -> list[tuple[int, ...]]:
    pts = []
    for v in itertools.product(range(q), repeat=dim):
        nz = [c for c in v if c]
        if nz and nz[0] == 1:
            pts.append(v)
    return pts


def pg3(q: int) -> Matroid:
    field = GF(q)
    pts = projective_points(q)
    labels = ["".join(map(str, p)) for p in pts]
    planes = set()
    for a in pts:
        planes.add(mask_of(i for i, x in enumerate(pts) if field.dot(a, x) == 0))
    planes = sorted(planes)
    lines = set()
    for i, P in enumerate(planes):
        for Q in planes[i + 1 :]:
            lines.add(P & Q)
    levels = [[0], [1 << i for i in range(len(pts))], sorted(lines), planes, [(1 << len(pts)) - 1]]
    return Matroid(labels, levels, name=f"PG(3,{q})")


def pg3_minus_point(q: int, point: str | None = None) -> Matroid:
    M = pg3(q)
    point = point or M.labels[0]
    N = delete(M, [point], name=f"PG(3,{q})-{point}")
    return N


def gen_named(family: str, *params) -> Matroid:
    family = family.lower()
    ints = []
    for p in params:
        try:
            ints.append(int(p))
        except (TypeError, ValueError):
            raise UnsupportedParam(f"parameter {p!r} is not an integer") from None
    if family == "uniform":
        if len(ints) != 2:
            raise UnsupportedParam("uniform takes r and n")
        return uniform(*ints)
    if family == "free":
        if len(ints) != 1:
            raise UnsupportedParam("free takes n")
        return free(ints[0])
    if family == "vamos":
        if ints:
            raise UnsupportedParam("vamos takes no parameters")
        return vamos()
    if family == "pg3":
        if len(ints) != 1:
            raise UnsupportedParam("pg3 takes q")
        return pg3(ints[0])
    if family == "u36-erection":
        if ints:
            raise UnsupportedParam("u36-erection takes no parameters")
        from .constructions import nonsticky_witness

        N = nonsticky_witness(uniform(3, 6), "a b", "c d").N
        N.name = "u36-erection"
        return N
    raise UnknownFamily(f"unknown family {family!r}; known: {', '.join(FAMILIES)}")


def u36_with_common_point() -> Matroid:
    """``U_{3,6}`` plus a point ``p`` on both lines ``ab`` and ``cd``."""
    from .cuts import crapo_extend, generate_cut

    M = uniform(3, 6)
    N = crapo_extend(M, generate_cut(M, ["a b", "c d"]), "p")
    N.name = "U3,6+p"
    return N


def non_matroid_rank_table() -> RankTable:
    """The impossible configuration of the failed amalgam, as a raw table.

    Lines ``ap`` and ``cp`` meet in ``p``; the line ``_e _P1`` is coplanar
    with both (planes ``a p _e _P1`` and ``c p _e _P1``) yet the three lines
    span rank 4 and ``p`` is off the third line.
    """
    labels = ["a", "c", "p", "_e", "_P1"]
    plane1 = mask_of([0, 2, 3, 4])
    plane2 = mask_of([1, 2, 3, 4])

    def r(X: int) -> int:
        size = bin(X).count("1")
        if size <= 3:
            return size
        if X & plane1 == X or X & plane2 == X:
            return 3
        return 4

    return RankTable.from_function(labels, r, name="non-matroid")
