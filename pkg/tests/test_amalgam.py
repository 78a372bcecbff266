import itertools
import random

import pytest

from matroid_lab.amalgam import (
    build_context,
    eta,
    eta_violation_anatomy,
    lattice_meet_join,
    modular_pair_exclusion_check,
    proper_amalgam,
    submodular_gap,
    verify_amalgam,
    xi,
    xi_submodular_on_lattice,
)
from matroid_lab.constructions import add_coloop, add_free_on_flat, nonsticky_witness
from matroid_lab.core import direct_sum, restriction_by_labels
from matroid_lab.cuts import crapo_extend, generate_cut
from matroid_lab.errors import NotInLattice, PreconditionFailed, RestrictionMismatch
from matroid_lab.named import u36_with_common_point, uniform

from conftest import pg, pg_minus


@pytest.fixture(scope="module")
def pg_pair():
    P = pg(2)
    A = add_free_on_flat(P, P.lines()[0], "x")
    B = add_free_on_flat(P, P.planes()[3], "y")
    return A, B


@pytest.fixture(scope="module")
def crossing():
    N2 = nonsticky_witness(uniform(3, 6), "a b", "c d").N
    return u36_with_common_point(), N2


def test_context_of_identical_matroids(V8):
    ctx = build_context(V8, V8)
    assert sorted(ctx.lattice) == sorted(V8.all_flats())
    assert all(ctx.eta(X) == V8.rank(X) for X in range(1 << V8.n))


def test_lattice_size_is_compatible_pair_count(pg_pair):
    A, B = pg_pair
    P = pg(2)
    T = set(P.labels)
    count = 0
    for F1 in A.all_flats():
        t1 = {x for x in A.labels_of(F1) if x in T}
        for F2 in B.all_flats():
            if {x for x in B.labels_of(F2) if x in T} == t1:
                count += 1
    ctx = build_context(A, B)
    assert len(ctx.lattice) == count
    assert 0 in ctx.lattice_set and ctx.ground in ctx.lattice_set


def test_restriction_mismatch(U36):
    other = uniform(2, 6)
    with pytest.raises(RestrictionMismatch):
        build_context(U36, other)
    with pytest.raises(RestrictionMismatch):
        build_context(U36, uniform(2, 2).relabel({"a": "x", "b": "y"}))


def test_eta_examples(pg_pair):
    A, B = pg_pair
    ctx = build_context(A, B)
    assert eta(ctx, []) == 0
    assert ctx.eta(ctx.ground) == A.rank() + B.rank() - pg(2).rank()


def test_xi_bounds_and_monotone(crossing):
    ctx = build_context(*crossing)
    rng = random.Random(3)
    for _ in range(400):
        X = rng.randrange(1 << ctx.n)
        v = ctx.xi(X)
        assert 0 <= v <= bin(X).count("1") and v <= ctx.eta(X)
        Y = X | rng.randrange(1 << ctx.n)
        assert ctx.xi(Y) >= v
    assert ctx.xi(ctx.ground) == ctx.eta(ctx.ground)


def test_xi_is_eta_on_big_lattice_members(pg_pair):
    ctx = build_context(*pg_pair)
    P = pg(2)
    for X in ctx.lattice:
        if P.rank(list(ctx.labels_of(X & ctx.T))) >= 2:
            assert ctx.xi(X) == ctx.eta(X)


def test_xi_via_smallest_member(crossing):
    ctx = build_context(*crossing)
    for X in range(0, 1 << ctx.n, 7):
        Z = ctx.smallest_member(X)
        assert Z in ctx.lattice_set and Z & X == X
        assert ctx.xi(X) == ctx.xi(Z)
    assert xi(ctx, ["a"]) == 1


def test_meet_join(crossing):
    ctx = build_context(*crossing)
    L = ctx.lattice
    X, Y = L[3], next(Z for Z in L if Z & L[3] == L[3] and Z != L[3])
    assert lattice_meet_join(ctx, X, Y) == (X, Y)
    rng = random.Random(0)
    for X, Y in (rng.sample(L, 2) for _ in range(300)):
        meet, join = lattice_meet_join(ctx, X, Y)
        assert meet in ctx.lattice_set and join in ctx.lattice_set
        assert ctx.eta(join) <= ctx.eta(X | Y)
        assert ctx.xi(X | Y) == ctx.xi(join)
    outside = next(S for S in range(1 << ctx.n) if S not in ctx.lattice_set)
    with pytest.raises(NotInLattice):
        lattice_meet_join(ctx, outside, ctx.ground)


def test_proper_amalgam_over_pg(pg_pair):
    A, B = pg_pair
    rep = proper_amalgam(A, B, brute_check=True, samples=20_000)
    assert rep.status == "exists" and rep.brute["ok"]
    assert verify_amalgam(rep.amalgam, A, B)
    assert xi_submodular_on_lattice(rep.context) is None


def test_proper_amalgam_of_matroid_with_itself(V8):
    rep = proper_amalgam(V8, V8)
    assert rep.status == "exists" and rep.amalgam == V8


def test_intersection_vs_erection_has_no_amalgam(crossing):
    rep = proper_amalgam(*crossing)
    assert rep.status == "fails" and rep.recheck()
    X, Y = rep.pair
    ctx = rep.context
    assert submodular_gap(ctx.xi, X, Y) == -1
    d = rep.as_dict()["violating_pair"]
    assert (d["xi_X"], d["xi_Y"], d["xi_meet"], d["xi_union"], d["deficit"]) == (3, 3, 3, 4, 1)
    assert {"p", "_e"} <= set(d["X_and_Y"])


def test_verify_amalgam_rejects_direct_sum():
    U = uniform(2, 3)
    A = add_free_on_flat(U, U.ground, "x")
    B = add_free_on_flat(U, U.ground, "y")
    wrong = direct_sum(A, restriction_by_labels(B, ["y"]))
    assert not verify_amalgam(wrong, A, B)
    assert verify_amalgam(U, U, U)


def test_anatomy_vacuous_over_pg(pg_pair):
    assert eta_violation_anatomy(build_context(*pg_pair)) == []


def test_anatomy_over_pg_minus_point():
    Q = pg_minus(2)
    lines = Q.lines()
    a, b = next((x, y) for x, y in itertools.combinations(lines, 2) if not x & y and Q.rank(x | y) == 3)
    cut = generate_cut(Q, [a, b])
    ctx = build_context(crapo_extend(Q, cut, "p"), crapo_extend(Q, cut, "q"))
    found = eta_violation_anatomy(ctx)
    assert len(found) == 49
    for v in found:
        assert v.gap == v.defect_identity == -1
        assert v.modular_in_1 and v.modular_in_2 and v.xi_is_eta
    shapes = [v.trace_shape for v in found]
    assert (shapes.count("coplanar-lines"), shapes.count("line-plane")) == (21, 28)
    assert proper_amalgam(ctx.M1, ctx.M2).status == "fails"


def test_exclusion_check_over_pg():
    P = pg(2)
    Z = add_coloop(P, "z")
    two_step = add_free_on_flat(Z, Z.closure(Z.mask(list(P.labels_of(P.lines()[0])) + ["z"])), "y")
    for Mp in (add_free_on_flat(P, P.planes()[0], "x"), add_coloop(P, "x"), two_step):
        assert modular_pair_exclusion_check(P, Mp, samples=2000) == []


def test_exclusion_check_preconditions(U36):
    with pytest.raises(PreconditionFailed):
        modular_pair_exclusion_check(U36, add_coloop(U36, "x"))
    P = pg(2)
    with pytest.raises(PreconditionFailed):
        modular_pair_exclusion_check(P, uniform(2, 3))


def test_exclusion_check_deterministic():
    P = pg(2)
    Mp = add_free_on_flat(add_coloop(P, "x"), "x", "y")
    runs = [modular_pair_exclusion_check(P, Mp, samples=500, seed=7) for _ in range(2)]
    assert runs[0] == runs[1]


def test_exclusion_check_finds_shapes_without_ote():
    # V8 is not OTE; intersecting a pair of crossing lines creates exactly the excluded modular pairs
    from matroid_lab.named import vamos

    V = vamos()
    N = crapo_extend(V, generate_cut(V, ["a c", "b d"]), "p")
    found = modular_pair_exclusion_check(V, N, check_preconditions=False, exhaustive_limit=9)
    assert found and {v.shape for v in found} <= {"lines", "line-plane"}
