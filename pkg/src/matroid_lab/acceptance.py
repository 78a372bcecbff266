"""The eleven acceptance checks, shared by ``matroid-lab selftest`` and the test suite.

Each check returns a :class:`CheckResult`; ``detail`` carries the numbers
behind the verdict so a failure is diagnosable from the printed line.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable

from .amalgam import (
    build_context,
    eta_violation_anatomy,
    proper_amalgam,
    submodular_gap,
    verify_amalgam,
    xi_submodular_on_lattice,
)
from .constructions import (
    add_coloop,
    add_free_on_flat,
    embed_ote_rank4,
    nonsticky_certificate,
    nonsticky_witness,
    witness_invariants,
)
from .core import (
    Matroid,
    are_isomorphic,
    check_flat_axioms,
    check_matroid_axioms,
    parse_matroid,
    serialize_matroid,
)
from .cuts import crapo_extend, enumerate_modular_cuts, generate_cut, is_intersectable, is_OTE, principal_cut
from .errors import PreconditionFailed
from .modularity import bundle_violations, check_escher, modular_defect
from .named import (
    u36_with_common_point,
    non_matroid_rank_table,
    free,
    pg3,
    pg3_minus_point,
    uniform,
    vamos,
)
from .oracles import count_single_element_extensions, xi_table


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        bits = ", ".join(f"{k}={v}" for k, v in self.detail.items())
        return f"[{verdict}] {self.number:>2}. {self.title} ({self.seconds:.1f}s) {bits}"


# -- shared fixtures ------------------------------------------------------------
def corpus() -> list[Matroid]:
    """Every matroid the axiom and Escher checks run over."""
    U36 = uniform(3, 6)
    U48 = uniform(4, 8)
    w3 = nonsticky_witness(U36, "a b", "c d")
    w4 = nonsticky_witness(U48, "a b c", "d e f")
    items = [
        uniform(2, 4),
        U36,
        U48,
        free(3),
        free(6),
        vamos(),
        pg3(2),
        pg3(3),
        pg3_minus_point(2),
        pg3_minus_point(4),
        u36_with_common_point(),
        w3.N0,
        w3.N,
        w4.N0,
        w4.N,
    ]
    # parsed forms go through the file format
    items += [parse_matroid(serialize_matroid(M)) for M in (uniform(2, 4), vamos(), pg3_minus_point(2))]
    return items


def pg32_extensions() -> list[tuple[str, Matroid]]:
    """Ten single-element extensions of PG(3,2), each adding an element ``x``."""
    P = pg3(2)
    pts, lines, planes = P.flats(1), P.lines(), P.planes()
    specs = [
        ("coloop", None),
        ("loop", P.flats(0)[0]),
        ("free", P.ground),
        ("point-0", pts[0]),
        ("point-7", pts[7]),
        ("line-0", lines[0]),
        ("line-11", lines[11]),
        ("line-30", lines[30]),
        ("plane-0", planes[0]),
        ("plane-9", planes[9]),
    ]
    out = []
    for name, F in specs:
        N = add_coloop(P, "x") if F is None else add_free_on_flat(P, F, "x")
        N.name = f"PG(3,2)+{name}"
        out.append((name, N))
    return out


def xi_contexts():
    """Five amalgam contexts with at most 12 elements."""
    U24, U23, U36, V8 = uniform(2, 4), uniform(2, 3), uniform(3, 6), vamos()
    ctxs = []
    ctxs.append(("U24 free+point", add_free_on_flat(U24, U24.ground, "x"), add_free_on_flat(U24, "a", "y")))
    ctxs.append(("U23 coloop+free", add_coloop(U23, "x"), add_free_on_flat(U23, U23.ground, "y")))
    N1 = u36_with_common_point()
    N2 = nonsticky_witness(U36, "a b", "c d").N
    ctxs.append(("U36 intersection vs erection", N1, N2))
    e1 = crapo_extend(U36, generate_cut(U36, ["a b", "c d"]), "x")
    e2 = crapo_extend(U36, generate_cut(U36, ["a b", "e f"]), "y")
    ctxs.append(("U36 two intersections", e1, e2))
    v1 = crapo_extend(V8, generate_cut(V8, ["a b", "c d"]), "x")
    v2 = add_free_on_flat(V8, "e f", "y")
    ctxs.append(("V8 intersection+line point", v1, v2))
    return ctxs


def _timed(fn: Callable[[], tuple[bool, dict]]) -> tuple[bool, dict, float]:
    t = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - t


# -- the checks -------------------------------------------------------------------
def check_1_axioms() -> tuple[bool, dict]:
    failures = []
    modes = {"exhaustive": 0, "sampled": 0}
    items = corpus()
    for M in items:
        rep = check_matroid_axioms(M, exhaustive_limit=10, samples=100_000, seed=1)
        modes[rep.mode] += 1
        flat_problem = check_flat_axioms(M)
        if not rep.ok or flat_problem:
            failures.append(f"{M.name}: {rep.message or flat_problem}")
    return not failures, {"matroids": len(items), **modes, "failures": failures or "none"}


def check_2_escher() -> tuple[bool, dict]:
    bad = [M.name for M in corpus() if check_escher(M)]
    found = check_escher(non_matroid_rank_table())
    ok = not bad and len(found) == 1
    return ok, {"corpus_with_violations": bad or "none", "table_violations": len(found)}


def check_3_crapo() -> tuple[bool, dict]:
    counts = {}
    ok = True
    for M in (uniform(1, 1), uniform(2, 3), uniform(2, 4)):
        cuts = len(enumerate_modular_cuts(M))
        brute = count_single_element_extensions(M)
        counts[M.name] = f"{cuts}/{brute}"
        ok &= cuts == brute
    ok &= counts["U2,4"] == "7/7"
    return ok, {"cuts/extensions": counts}


def check_4_modular_sticky() -> tuple[bool, dict]:
    exts = pg32_extensions()
    cuts = set()
    for _, N in exts:
        cuts.add(frozenset(N.flat_set()))
    distinct = len(cuts) == len(exts)
    pairs = 0
    problems = []
    for (n1, A), (n2, B) in itertools.combinations_with_replacement(exts, 2):
        B = B.relabel({"x": "y"})
        rep = proper_amalgam(A, B)
        pairs += 1
        if rep.status != "exists":
            problems.append(f"{n1}/{n2}: {rep.status}")
            continue
        if not verify_amalgam(rep.amalgam, A, B):
            problems.append(f"{n1}/{n2}: restriction mismatch")
        if xi_submodular_on_lattice(rep.context) is not None:
            problems.append(f"{n1}/{n2}: ξ not submodular on L")
    return distinct and not problems, {"extensions": len(exts), "distinct": distinct, "pairs": pairs, "problems": problems or "none"}


def check_5_no_amalgam() -> tuple[bool, dict]:
    N1 = u36_with_common_point()
    N2 = nonsticky_witness(uniform(3, 6), "a b", "c d").N
    rep = proper_amalgam(N1, N2)
    if rep.status != "fails":
        return False, {"status": rep.status}
    v = rep.values
    deficit = v["xi_meet"] + v["xi_union"] - v["xi_X"] - v["xi_Y"]
    ctx = rep.context
    X, Y = rep.pair
    # recompute the four values from scratch on a fresh context
    fresh = build_context(N1, N2)
    same = [fresh.xi(Z) for Z in (X, Y, X & Y, X | Y)] == [v["xi_X"], v["xi_Y"], v["xi_meet"], v["xi_union"]]
    return rep.recheck() and deficit >= 1 and same, {
        "X": ctx.fmt(X),
        "Y": ctx.fmt(Y),
        "xi": f"{v['xi_X']}+{v['xi_Y']} vs {v['xi_meet']}+{v['xi_union']}",
        "deficit": deficit,
    }


def check_6_witness() -> tuple[bool, dict]:
    detail = {}
    ok = True
    for M, F, H in ((uniform(3, 6), "a b", "c d"), (uniform(4, 8), "a b c", "d e f")):
        w = nonsticky_witness(M, F, H)
        rkF = M.rank(M.mask(F))
        dT = modular_defect(w.N0, w.T1, w.T2)
        dB = modular_defect(w.N0, w.B1, w.B2)
        bad = witness_invariants(w)
        ok &= dT == dB == rkF - 1 and not bad
        detail[M.name] = f"rkF={rkF} dT={dT} dB={dB} |N|={w.N.n} rank={w.N.rank()} failed={bad or 'none'}"
    return ok, detail


def check_7_xi_oracle() -> tuple[bool, dict]:
    detail = {}
    ok = True
    for name, A, B in xi_contexts():
        ctx = build_context(A, B)
        if ctx.n > 12:
            return False, {name: f"|E|={ctx.n} exceeds 12"}
        table = xi_table(ctx)
        mism = sum(1 for X in range(1 << ctx.n) if ctx.xi(X) != int(table[X]))
        ok &= mism == 0
        detail[name] = f"|E|={ctx.n} mismatches={mism}"
    return ok, detail


def _rank4_anatomy(contexts) -> tuple[int, int, int]:
    """(η-violating pairs, pairs breaking the anatomy, pairs where gap != identity)."""
    found = bad = gap_bad = 0
    for A, B in contexts:
        ctx = build_context(A, B)
        for v in eta_violation_anatomy(ctx):
            found += 1
            if v.defect_identity != -1 or v.trace_shape not in ("coplanar-lines", "line-plane"):
                bad += 1
            if v.gap != v.defect_identity:
                gap_bad += 1
    return found, bad, gap_bad


def identity_holds_everywhere(A: Matroid, B: Matroid) -> bool:
    """The η gap equals δ1 + δ2 − δT on every incomparable lattice pair."""
    ctx = build_context(A, B)
    L = ctx.lattice
    for i, X in enumerate(L):
        for Y in L[i + 1 :]:
            if X & Y in (X, Y):
                continue
            d1 = modular_defect(ctx.M1, X & ctx.E1, Y & ctx.E1)
            d2 = modular_defect(ctx.M2, ctx.part2(X), ctx.part2(Y))
            dT = modular_defect(ctx.M1, X & ctx.T, Y & ctx.T)
            if submodular_gap(ctx.eta, X, Y) != d1 + d2 - dT:
                return False
    return True


def check_8_anatomy() -> tuple[bool, dict]:
    exts = [N for _, N in pg32_extensions()]
    ote_contexts = [(exts[i], exts[j].relabel({"x": "y"})) for i, j in ((0, 3), (2, 5), (3, 4), (5, 6), (7, 8), (6, 9))]
    if not is_OTE(pg3(2)):
        return False, {"error": "PG(3,2) is not OTE"}
    found, bad, gap_bad = _rank4_anatomy(ote_contexts)
    identity = all(identity_holds_everywhere(A, B) for A, B in ote_contexts[:2])
    # rank-4 hypermodular, not OTE: η violations do occur and must look the same
    Q = pg3_minus_point(2)
    lines = Q.lines()
    a, b = next((x, y) for i, x in enumerate(lines) for y in lines[i + 1 :] if not x & y and Q.rank(x | y) == 3)
    cut = generate_cut(Q, [a, b])
    hm_contexts = [(crapo_extend(Q, cut, "p"), crapo_extend(Q, cut, "q"))]
    hm_found, hm_bad, hm_gap_bad = _rank4_anatomy(hm_contexts)
    ok = bad == 0 and gap_bad == 0 and identity and hm_bad == 0 and hm_gap_bad == 0
    return ok, {
        "ote_contexts": len(ote_contexts),
        "ote_eta_violations": found,
        "ote_anatomy_failures": bad,
        "gap_identity_all_pairs": identity,
        "hypermodular_eta_violations": hm_found,
        "hypermodular_anatomy_failures": hm_bad,
    }


def check_9_embedding() -> tuple[bool, dict]:
    chain = embed_ote_rank4(pg3_minus_point(2))
    iso = are_isomorphic(chain.result, pg3(2)) is not None
    noop = embed_ote_rank4(pg3(2))
    ok = len(chain) == 1 and iso and len(noop) == 0 and noop.result == pg3(2)
    return ok, {"steps": len(chain), "isomorphic_to_PG32": iso, "PG32_steps": len(noop)}


def check_10_nonsticky() -> tuple[bool, dict]:
    c1 = nonsticky_certificate(uniform(3, 6), "a b", "c d")
    c2 = nonsticky_certificate(vamos())
    try:
        nonsticky_certificate(pg3(2))
        pg = "certificate produced"
    except PreconditionFailed as exc:
        pg = f"no intersectable pair ({exc})"
    ok = c1.status == "fails" and c1.report.recheck() and c2.status == "fails" and c2.report.recheck()
    ok &= pg.startswith("no intersectable pair")
    return ok, {
        "U36": c1.status,
        "V8": f"{c2.status} on F={{{' '.join(c2.F)}}} H={{{' '.join(c2.H)}}}",
        "PG32": pg.split(" (")[0],
    }


def check_11_bundle_ote() -> tuple[bool, dict]:
    V8, P, U36 = vamos(), pg3(2), uniform(3, 6)
    bv, bp = bundle_violations(V8), bundle_violations(P)
    op, ov, ou = is_OTE(P), is_OTE(V8), is_OTE(U36)
    witnesses_ok = True
    for M, res in ((V8, ov), (U36, ou)):
        w = res.witness
        witnesses_ok &= w is not None and modular_defect(M, w.X, w.Y) > 0 and is_intersectable(M, w.X, w.Y)
    ok = bool(bv) and not bp and op.holds and not ov.holds and not ou.holds and witnesses_ok
    return ok, {
        "V8_bundle": len(bv),
        "PG32_bundle": len(bp),
        "OTE(PG32)": op.holds,
        "OTE(V8)": ov.holds,
        "OTE(U36)": ou.holds,
        "witnesses_verified": witnesses_ok,
    }


CHECKS: list[tuple[int, str, Callable[[], tuple[bool, dict]]]] = [
    (1, "rank axioms on the corpus", check_1_axioms),
    (2, "Escher configurations", check_2_escher),
    (3, "modular cuts vs brute-force extensions", check_3_crapo),
    (4, "extensions of PG(3,2) amalgamate", check_4_modular_sticky),
    (5, "intersection point vs erection has no amalgam", check_5_no_amalgam),
    (6, "erection invariants", check_6_witness),
    (7, "ξ over the lattice vs all supersets", check_7_xi_oracle),
    (8, "rank-4 η-violation anatomy", check_8_anatomy),
    (9, "OTE embedding of PG(3,2) minus a point", check_9_embedding),
    (10, "non-stickiness certificates", check_10_nonsticky),
    (11, "bundle condition and OTE", check_11_bundle_ote),
]


def run_check(number: int) -> CheckResult:
    for num, title, fn in CHECKS:
        if num == number:
            try:
                ok, detail, secs = _timed(fn)
            except Exception as exc:  # reported as a failure, not a crash
                return CheckResult(num, title, False, {"error": f"{type(exc).__name__}: {exc}"})
            return CheckResult(num, title, ok, detail, secs)
    raise KeyError(number)


def run_all(only: list[int] | None = None) -> list[CheckResult]:
    return [run_check(num) for num, _, _ in CHECKS if only is None or num in only]
