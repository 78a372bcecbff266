import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from matroid_lab.amalgam import build_context, proper_amalgam, submodular_gap
from matroid_lab.constructions import add_free_on_flat, nonsticky_witness
from matroid_lab.core import check_matroid_axioms, parse_matroid, serialize_matroid
from matroid_lab.cuts import crapo_extend, cut_of_extension, generate_cut
from matroid_lab.modularity import hochstaettler_holds, modular_defect
from matroid_lab.named import u36_with_common_point, free, pg3_minus_point, uniform, vamos

SMALL = [uniform(2, 4), uniform(3, 6), uniform(2, 5), vamos(), free(4), pg3_minus_point(2)]
matroids = st.sampled_from(SMALL)

CROSSING = build_context(u36_with_common_point(), nonsticky_witness(uniform(3, 6), "a b", "c d").N)
_U = uniform(2, 4)
GOOD = proper_amalgam(add_free_on_flat(_U, _U.ground, "x"), add_free_on_flat(_U, "a", "y")).amalgam


@st.composite
def matroid_and_sets(draw, k=2):
    M = draw(matroids)
    sets = [draw(st.integers(0, M.ground)) for _ in range(k)]
    return (M, *sets)


@settings(max_examples=150, deadline=None)
@given(matroid_and_sets(3))
def test_closure_properties(args):
    M, X, Y, _ = args
    cX = M.closure(X)
    assert cX & X == X
    assert M.closure(cX) == cX and M.is_flat(cX)
    assert M.rank(cX) == M.rank(X)
    if X & Y == X:
        assert M.closure(Y) & cX == cX


@settings(max_examples=150, deadline=None)
@given(matroid_and_sets(2))
def test_rank_axioms_on_random_pairs(args):
    M, X, Y = args
    assert 0 <= M.rank(X) <= bin(X).count("1")
    assert M.rank(X | Y) >= M.rank(X)
    assert M.rank(X) + M.rank(Y) >= M.rank(X | Y) + M.rank(X & Y)


@settings(max_examples=150, deadline=None)
@given(matroid_and_sets(2))
def test_defect_symmetric_nonnegative(args):
    M, X, Y = args
    F, G = M.closure(X), M.closure(Y)
    assert modular_defect(M, F, G) == modular_defect(M, G, F) >= 0


@settings(max_examples=150, deadline=None)
@given(matroid_and_sets(3))
def test_removing_part_of_a_modular_pair_keeps_it_modular(args):
    M, X, Y, Z = args
    X, Y = M.closure(X), M.closure(Y)
    Z &= X & ~Y
    assert hochstaettler_holds(M, X, Y, Z)


@settings(max_examples=60, deadline=None)
@given(matroids, st.lists(st.integers(0, 2**14), min_size=1, max_size=3))
def test_generated_cuts_give_matroids(M, seeds):
    flats = [M.closure(s & M.ground) for s in seeds]
    cut = generate_cut(M, flats)
    N = crapo_extend(M, cut, "new")
    assert cut_of_extension(N, "new").members == cut.members
    for F in flats:
        assert F in cut
    if M.n <= 8:
        assert check_matroid_axioms(N).ok


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**11 - 1), st.integers(0, 2**11 - 1))
def test_xi_is_subcardinal_and_monotone(X, Y):
    ctx = CROSSING
    assert 0 <= ctx.xi(X) <= bin(X).count("1")
    assert ctx.xi(X | Y) >= ctx.xi(X)
    assert ctx.xi(X) <= ctx.eta(X)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**6 - 1), st.integers(0, 2**6 - 1))
def test_amalgam_rank_is_submodular(X, Y):
    assert submodular_gap(GOOD.rank, X, Y) >= 0


@settings(max_examples=40, deadline=None)
@given(matroids, st.permutations(range(8)))
def test_round_trip_after_relabel(M, perm):
    names = [f"e{perm[i % 8]}_{i}" for i in range(M.n)]
    R = M.relabel(dict(zip(M.labels, names)))
    assert parse_matroid(serialize_matroid(R)) == R


def test_uniform_flat_counts():
    for r, n in itertools.product(range(1, 4), range(3, 7)):
        if r <= n:
            M = uniform(r, n)
            counts = M.flat_counts()
            from math import comb

            assert counts == [comb(n, k) for k in range(r)] + [1]
