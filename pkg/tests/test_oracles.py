import random

import pytest

from matroid_lab.amalgam import build_context
from matroid_lab.constructions import add_free_on_flat, nonsticky_witness
from matroid_lab.errors import TooLarge
from matroid_lab.named import u36_with_common_point, uniform
from matroid_lab.oracles import (
    brute_xi,
    count_single_element_extensions,
    gf_rank,
    pg3_rank_oracle,
    single_element_extensions,
    xi_table,
)

from conftest import pg


def test_extension_search_small_cases():
    # U_{1,1}: p a loop, p parallel to the element, or p a coloop
    assert count_single_element_extensions(uniform(1, 1)) == 3
    assert count_single_element_extensions(uniform(0, 1)) == 2
    with pytest.raises(TooLarge):
        count_single_element_extensions(uniform(2, 7))


def test_extension_tables_are_rank_functions():
    M = uniform(2, 3)
    for table in single_element_extensions(M):
        assert all(table[X] - M.rank(X) in (0, 1) for X in range(8))


def test_xi_table_matches_lattice_minimum():
    N2 = nonsticky_witness(uniform(3, 6), "a b", "c d").N
    ctx = build_context(u36_with_common_point(), N2)
    table = xi_table(ctx)
    assert all(int(table[X]) == ctx.xi(X) for X in range(1 << ctx.n))
    rng = random.Random(11)
    for X in rng.sample(range(1 << ctx.n), 40):
        assert brute_xi(ctx, X) == ctx.xi(X)


def test_xi_table_size_limit():
    P = pg(2)
    ctx = build_context(add_free_on_flat(P, P.ground, "x"), add_free_on_flat(P, P.ground, "y"))
    with pytest.raises(TooLarge):
        xi_table(ctx)


@pytest.mark.parametrize("q", [2, 3])
def test_pg_rank_agrees_with_linear_algebra(q):
    P = pg(q)
    rank = pg3_rank_oracle(q)
    rng = random.Random(q)
    for _ in range(300):
        labels = rng.sample(P.labels, rng.randint(0, 6))
        assert P.rank(labels) == rank(labels)


def test_gf_rank():
    assert gf_rank(2, [(1, 0), (0, 1), (1, 1)]) == 2
    assert gf_rank(3, [(1, 2, 0), (2, 1, 0)]) == 1
    assert gf_rank(4, [(1, 2), (2, 3)]) == 1  # 2·(1,2) = (2,3) in GF(4)
