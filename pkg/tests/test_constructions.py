import pytest

from matroid_lab.constructions import (
    COMPLETE,
    PARTIAL,
    add_coloop,
    add_free_on_flat,
    count_intersectable_pairs,
    embed_ote_general,
    embed_ote_rank4,
    hypermodular_completion,
    nonsticky_certificate,
    nonsticky_witness,
    witness_invariants,
)
from matroid_lab.core import are_isomorphic, check_matroid_axioms, restriction_by_labels, same_matroid
from matroid_lab.cuts import is_OTE
from matroid_lab.errors import LabelClash, NotAFlat, PreconditionFailed
from matroid_lab.modularity import is_hypermodular, modular_defect
from matroid_lab.named import free, uniform

from conftest import pg, pg_minus


def test_add_free_on_flat(U36, PG32):
    N = add_free_on_flat(U36, U36.ground, "x")
    assert N.rank() == 3 and N.rank("x") == 1
    N = add_free_on_flat(U36, "a", "x")
    assert N.rank("a x") == 1
    line = PG32.lines()[0]
    N = add_free_on_flat(PG32, line, "x")
    assert bin(N.closure(N.mask(list(PG32.labels_of(line))))).count("1") == 4
    assert same_matroid(restriction_by_labels(N, PG32.labels), PG32)
    with pytest.raises(NotAFlat):
        add_free_on_flat(U36, "a b c", "x")
    with pytest.raises(LabelClash):
        add_free_on_flat(U36, "a", "b")


def test_add_coloop(U36):
    N = add_coloop(U36, "z")
    assert N.rank() == 4 and N.rank("z") == 1 and N.rank("a b c z") == 4


def test_witness_rank3(U36):
    w = nonsticky_witness(U36, "a b", "c d")
    assert (len(w.A), len(w.P), len(w.Q)) == (0, 1, 1)
    assert (w.N.n, w.N.rank()) == (10, 4)
    assert w.defect_T == w.defect_B == 1
    assert witness_invariants(w) == []
    assert check_matroid_axioms(w.N).ok


def test_witness_rank4():
    U48 = uniform(4, 8)
    w = nonsticky_witness(U48, "a b c", "d e f")
    assert (len(w.A), len(w.P), len(w.Q), w.N.rank()) == (0, 2, 2, 5)
    assert w.defect_T == w.defect_B == 2
    assert witness_invariants(w) == []
    assert [len(c) for c in w.chains] == [2, 2]


def test_witness_with_nonempty_A(V8):
    # ceg spans a plane, ab is a line not modular with it; H ∪ A = closure of H in N0
    w = nonsticky_witness(V8, "a b", "c e g")
    assert witness_invariants(w) == []
    assert w.N0.rank() == 5


def test_witness_preconditions(U36, PG32):
    with pytest.raises(PreconditionFailed):
        nonsticky_witness(U36, "a b", "a b c d e f")
    with pytest.raises(PreconditionFailed):
        nonsticky_witness(PG32, PG32.lines()[0], PG32.planes()[0])


def test_certificates(U36, V8):
    c = nonsticky_certificate(U36, "a b", "c d")
    assert c.status == "fails" and c.report.recheck()
    c = nonsticky_certificate(V8)
    assert c.status == "fails" and c.report.recheck()
    assert modular_defect(V8, list(c.F), list(c.H)) == 1
    with pytest.raises(PreconditionFailed):
        nonsticky_certificate(pg(2))


def test_certificate_contracts_common_part():
    U48 = uniform(4, 8)
    # planes abc and ade meet in a, which is contracted first
    c = nonsticky_certificate(U48, "a b c", "a d e")
    assert c.contracted == ("a",)
    assert c.reduced.rank() == 3
    assert c.status == "fails"


def test_embed_rank4():
    chain = embed_ote_rank4(pg_minus(2))
    assert len(chain) == 1 and chain.status == COMPLETE
    assert are_isomorphic(chain.result, pg(2)) is not None
    noop = embed_ote_rank4(pg(2))
    assert len(noop) == 0 and noop.result == pg(2)


def test_embed_rank4_rejects_vamos(V8):
    with pytest.raises(PreconditionFailed):
        embed_ote_rank4(V8)
    with pytest.raises(PreconditionFailed):
        embed_ote_rank4(uniform(3, 6))


def test_embed_general_modular_is_complete():
    for M in (pg(2), free(4)):
        chain = embed_ote_general(M, 5)
        assert chain.status == COMPLETE and len(chain) == 0


def test_embed_general_u36_stays_partial(U36):
    chain = embed_ote_general(U36, 6)
    assert chain.status == PARTIAL and len(chain) == 6
    assert chain.result.rank() == 3
    assert same_matroid(restriction_by_labels(chain.result, U36.labels), U36)
    assert chain.info["remaining_pairs"] > 0


def test_embed_general_is_reproducible(V8):
    a = embed_ote_general(V8, 8)
    b = embed_ote_general(V8, 8)
    assert a.log() == b.log() and a.result == b.result
    assert a.result.rank() == 4


def test_hypermodular_completion(U36, V8):
    done = hypermodular_completion(pg(2), 3)
    assert done.status == COMPLETE and len(done) == 0
    part = hypermodular_completion(U36, 3)
    assert part.status == PARTIAL and len(part) == 3
    v = hypermodular_completion(V8, 10)
    passes = v.info["passes"]
    assert passes[0]["open_pairs"] > 0 and all("open_pairs" in p for p in passes)
    assert same_matroid(restriction_by_labels(v.result, V8.labels), V8)


def test_hypermodular_completion_of_pg_minus_point():
    M = pg_minus(2)
    chain = hypermodular_completion(M, 5)
    assert chain.status == COMPLETE and is_hypermodular(chain.result)


def test_count_intersectable_pairs(U36):
    assert count_intersectable_pairs(pg(2)) == 0
    assert count_intersectable_pairs(U36) == 45
    assert count_intersectable_pairs(U36, cap=5) == 5


def test_negative_budget(U36):
    with pytest.raises(PreconditionFailed):
        embed_ote_general(U36, -1)


def test_ote_after_rank4_embedding():
    assert is_OTE(embed_ote_rank4(pg_minus(3)).result)
