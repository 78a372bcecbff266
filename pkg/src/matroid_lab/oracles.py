"""Slow, independent reference computations used to cross-check the library.

Nothing here touches flat lattices or modular cuts: extensions are found by
searching rank tables, ξ by minimizing over all supersets, and projective
ranks by Gaussian elimination.
"""

from __future__ import annotations

import numpy as np

from .core import Matroid, popcount
from .errors import TooLarge
from .named import GF, projective_points

ORACLE_EXTENSION_LIMIT = 6
ORACLE_XI_LIMIT = 16


def single_element_extensions(M: Matroid, limit: int = ORACLE_EXTENSION_LIMIT) -> list[tuple[int, ...]]:
    """All rank functions of ``M + p``, as the tuple ``r'(X ∪ p)`` over ``X``.

    Depth-first search over subsets in order of size.  Each value is
    ``r(X)`` or ``r(X) + 1``; a partial assignment is pruned by unit increase
    and by local submodularity at the top set ``X ∪ p`` (together these
    imply submodularity everywhere).
    """
    n = M.n
    if n > limit:
        raise TooLarge(f"extension search is limited to {limit} elements")
    r = [M.rank(X) for X in range(1 << n)]
    order = sorted(range(1 << n), key=lambda X: (popcount(X), X))
    v = [-1] * (1 << n)
    out: list[tuple[int, ...]] = []

    def ok(X: int) -> bool:
        vx = v[X]
        members = [i for i in range(n) if X >> i & 1]
        for a in members:
            Y = X ^ (1 << a)
            if not 0 <= vx - v[Y] <= 1:
                return False
            # elements p and a on top of Y
            if v[Y] + r[X] < vx + r[Y]:
                return False
        for i, a in enumerate(members):
            for b in members[i + 1 :]:
                S = X ^ (1 << a) ^ (1 << b)
                if v[S | 1 << a] + v[S | 1 << b] < vx + v[S]:
                    return False
        return True

    def rec(pos: int) -> None:
        if pos == len(order):
            out.append(tuple(v))
            return
        X = order[pos]
        for val in (r[X], r[X] + 1):
            v[X] = val
            if ok(X):
                rec(pos + 1)
        v[X] = -1

    rec(0)
    return out


def count_single_element_extensions(M: Matroid, limit: int = ORACLE_EXTENSION_LIMIT) -> int:
    return len(single_element_extensions(M, limit))


def extension_rank_from_cut(M: Matroid, cut, X: int, p_in: bool) -> int:
    """Rank in ``M +_cut p`` straight from the defining formula."""
    if not p_in:
        return M.rank(X)
    return M.rank(X) if M.closure(X) in cut.members else M.rank(X) + 1


def xi_table(ctx, limit: int = ORACLE_XI_LIMIT) -> np.ndarray:
    """ξ on every subset of ``E``: η on every subset, then a superset-minimum sweep."""
    n = ctx.n
    if n > limit:
        raise TooLarge(f"ξ table is limited to {limit} elements")
    size = 1 << n
    table = np.fromiter((ctx.eta(X) for X in range(size)), dtype=np.int64, count=size)
    idx = np.arange(size)
    for i in range(n):
        without = idx[(idx >> i) & 1 == 0]
        # afterwards table[X] minimizes over supersets of X that differ in bits <= i
        table[without] = np.minimum(table[without], table[without | (1 << i)])
    return table


def brute_xi(ctx, X: int) -> int:
    """``min η(Y)`` over every ``Y ⊇ X``, by enumerating the complement's submasks."""
    comp = ctx.ground & ~X
    best = ctx.eta(X | comp)
    sub = comp
    while True:
        val = ctx.eta(X | sub)
        if val < best:
            best = val
        if sub == 0:
            break
        sub = (sub - 1) & comp
    return best


def gf_rank(q: int, vectors) -> int:
    """Rank of a list of vectors over GF(q) by Gaussian elimination."""
    field = GF(q)
    inv = {a: b for a in range(1, q) for b in range(1, q) if field.mul[a][b] == 1}
    neg = {a: b for a in range(q) for b in range(q) if field.add[a][b] == 0}
    rows = [list(v) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        s = inv[rows[rank][c]]
        rows[rank] = [field.mul[s][x] for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = neg[rows[i][c]]
                rows[i] = [field.add[x][field.mul[f][y]] for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def pg3_rank_oracle(q: int):
    """Rank function of PG(3, q) on label strings, by linear algebra."""
    pts = {"".join(map(str, p)): p for p in projective_points(q)}

    def rank(labels) -> int:
        vecs = [pts[lab] for lab in labels]
        return gf_rank(q, vecs) if vecs else 0

    return rank
