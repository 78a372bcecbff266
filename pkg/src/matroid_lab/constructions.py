"""Extension-building procedures: free additions, the erection that keeps a
pair non-modular forever, the non-stickiness pipeline and embedding chains.

Pair lists are ordered by (rank, sorted element indices) so every chain is
deterministic and can be replayed from its log.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .amalgam import SubmodularityReport, proper_amalgam
from .core import Matroid, bits, contract, mask_key, popcount
from .cuts import (
    ChainStep,
    ExtensionChain,
    ModularCut,
    crapo_extend,
    generate_cut,
    is_intersectable,
    is_OTE,
    min_max_pair,
    principal_cut,
    reduce_defect_chain,
)
from .errors import ConstructionError, IsOTE, LabelClash, NotAFlat, NotIntersectable, PreconditionFailed
from .modularity import (
    bundle_violations,
    count_nonmodular_hyperplane_pairs,
    is_hypermodular,
    is_modular,
    modular_defect,
)

log = logging.getLogger(__name__)

COMPLETE = "Complete"
PARTIAL = "Partial"


def _fresh(taken: set[str], base: str) -> str:
    if base not in taken:
        return base
    k = 2
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def _fresh_series(taken: set[str], prefix: str, count: int) -> list[str]:
    out = []
    k = 1
    while len(out) < count:
        lab = f"{prefix}{k}"
        if lab not in taken:
            out.append(lab)
        k += 1
    return out


def add_free_on_flat(M: Matroid, F, label: str, name=None) -> Matroid:
    """Add ``label`` freely to the flat ``F`` (the principal cut of ``F``)."""
    F = M.mask(F)
    if not M.is_flat(F):
        raise NotAFlat(f"{M.fmt(F)} is not a flat")
    if label in M.labels:
        raise LabelClash(f"label {label!r} already used")
    return crapo_extend(M, principal_cut(M, F), label, check=False, name=name or M.name)


def add_coloop(M: Matroid, label: str, name=None) -> Matroid:
    if label in M.labels:
        raise LabelClash(f"label {label!r} already used")
    return crapo_extend(M, ModularCut(M, frozenset()), label, check=False, name=name or M.name)


# -- the erection ---------------------------------------------------------------
@dataclass
class WitnessBundle:
    M: Matroid
    F: int
    H: int
    A: list[str]
    e: str
    f: str
    P: list[str]
    Q: list[str]
    N0: Matroid
    N: Matroid
    T1: int
    T2: int
    B1: int
    B2: int
    defect_T: int
    defect_B: int
    chains: tuple[ExtensionChain, ExtensionChain]

    def as_dict(self) -> dict:
        N0 = self.N0
        return {
            "F": list(self.M.labels_of(self.F)),
            "H": list(self.M.labels_of(self.H)),
            "A": self.A,
            "e": self.e,
            "f": self.f,
            "P": self.P,
            "Q": self.Q,
            "T1": list(N0.labels_of(self.T1)),
            "T2": list(N0.labels_of(self.T2)),
            "B1": list(N0.labels_of(self.B1)),
            "B2": list(N0.labels_of(self.B2)),
            "defect_T1_T2_in_N0": self.defect_T,
            "defect_B1_B2_in_N0": self.defect_B,
            "N0": {"elements": N0.n, "rank": N0.rank()},
            "N": {"elements": self.N.n, "rank": self.N.rank()},
            "chains": [c.log() for c in self.chains],
        }


def witness_invariants(w: WitnessBundle) -> list[str]:
    """Names of the bundle invariants that fail (empty when all hold)."""
    bad = []
    M, N0, N = w.M, w.N0, w.N
    rkF = M.rank(w.F)
    A = N0.mask(w.A)
    if N0.rank() != M.rank() + 1:
        bad.append("rank(N0) = rank(M) + 1")
    if N0.closure(w.H) != w.H | A:
        bad.append("cl_N0(H) = H ∪ A")
    if w.defect_T != rkF - 1 or modular_defect(N0, w.T1, w.T2) != rkF - 1:
        bad.append("δ_N0(T1, T2) = rk F − 1")
    if w.defect_B != rkF - 1 or modular_defect(N0, w.B1, w.B2) != rkF - 1:
        bad.append("δ_N0(B1, B2) = rk F − 1")
    cT1, cT2, cB1, cB2 = (N.closure(X) for X in (w.T1, w.T2, w.B1, w.B2))
    if modular_defect(N, cT1, cT2):
        bad.append("(cl T1, cl T2) modular in N")
    if modular_defect(N, cB1, cB2):
        bad.append("(cl B1, cl B2) modular in N")
    P, Q = N.mask(w.P), N.mask(w.Q)
    if P & cT1 & cT2 != P:
        bad.append("P ⊆ cl T1 ∩ cl T2")
    if Q & cB1 & cB2 != Q:
        bad.append("Q ⊆ cl B1 ∩ cl B2")
    if len(w.P) != rkF - 1 or len(w.Q) != rkF - 1:
        bad.append("|P| = |Q| = rk F − 1")
    return bad


def nonsticky_witness(M: Matroid, F, H) -> WitnessBundle:
    """Erect a Vámos-type configuration over the disjoint pair ``(F, H)``.

    ``A`` (``r − 1 − rk F`` elements) goes freely onto ``H``, then a coloop
    ``e`` and a free element ``f``; the hyperplane pairs ``(F∪A∪e, H∪A∪e)``
    and ``(F∪A∪f, H∪A∪f)`` are then made modular by defect-reducing chains
    adding ``P`` and ``Q``.
    """
    F, H = M.mask(F), M.mask(H)
    r = M.rank()
    if not (M.is_flat(F) and M.is_flat(H)):
        raise PreconditionFailed("F and H must be flats")
    if F & H:
        raise PreconditionFailed(f"{M.fmt(F)} and {M.fmt(H)} are not disjoint")
    if H not in M.hyperplanes():
        raise PreconditionFailed(f"{M.fmt(H)} is not a hyperplane")
    if r < 3:
        raise PreconditionFailed(f"rank {r} is below 3")
    rkF = M.rank(F)
    if not 2 <= rkF <= r - 1:
        raise PreconditionFailed(f"rank of F is {rkF}, outside 2..{r - 1}")
    if modular_defect(M, F, H) == 0:
        raise PreconditionFailed(f"{M.fmt(F)} and {M.fmt(H)} form a modular pair")

    taken = set(M.labels)
    A = _fresh_series(taken, "_A", r - 1 - rkF)
    taken |= set(A)
    e = _fresh(taken, "_e")
    taken.add(e)
    f = _fresh(taken, "_f")
    taken.add(f)
    P = _fresh_series(taken, "_P", rkF - 1)
    taken |= set(P)
    Q = _fresh_series(taken, "_Q", rkF - 1)

    cur = M
    for lab in A:
        cur = add_free_on_flat(cur, cur.closure(H), lab)
    cur = add_coloop(cur, e)
    cur = add_free_on_flat(cur, cur.ground, f)
    N0 = cur
    N0.name = f"{M.name or 'M'}-erection-base"
    Am, eb, fb = N0.mask(A), N0.mask([e]), N0.mask([f])
    T1, T2 = F | Am | eb, H | Am | eb
    B1, B2 = F | Am | fb, H | Am | fb
    dT, dB = modular_defect(N0, T1, T2), modular_defect(N0, B1, B2)

    chain1 = reduce_defect_chain(N0, N0.closure(T1), N0.closure(T2), labels=P)
    N1 = chain1.result
    chain2 = reduce_defect_chain(N1, N1.closure(B1), N1.closure(B2), labels=Q)
    N = chain2.result
    N.name = f"{M.name or 'M'}-erection"
    w = WitnessBundle(M, F, H, A, e, f, chain1.new_labels, chain2.new_labels, N0, N, T1, T2, B1, B2, dT, dB, (chain1, chain2))
    bad = witness_invariants(w)
    if bad:
        raise ConstructionError("erection invariants failed: " + "; ".join(bad))
    return w


# -- non-stickiness pipeline ---------------------------------------------------------
@dataclass
class NonstickyCertificate:
    M: Matroid
    F: tuple[str, ...]
    H: tuple[str, ...]
    contracted: tuple[str, ...]
    reduced: Matroid
    chain: ExtensionChain
    witness: WitnessBundle
    report: SubmodularityReport

    @property
    def status(self) -> str:
        return self.report.status

    def as_dict(self) -> dict:
        return {
            "matroid": self.M.name,
            "F": list(self.F),
            "H": list(self.H),
            "contracted": list(self.contracted),
            "working_matroid": {"elements": list(self.reduced.labels), "rank": self.reduced.rank()},
            "N1_chain": self.chain.log(),
            "N2": {"elements": self.witness.N.n, "rank": self.witness.N.rank()},
            "amalgam": self.report.as_dict(),
        }


def nonsticky_certificate(M: Matroid, F=None, H=None) -> NonstickyCertificate:
    """Two extensions of ``M`` without a common proper amalgam.

    ``N1`` makes ``(F, H)`` modular, ``N2`` is the erection over ``(F, H)``
    that keeps them non-modular; the violating ξ pair of their amalgam is the
    certificate.  Without ``F`` and ``H`` the pair comes from
    :func:`min_max_pair`.  A non-empty ``F ∩ H`` is contracted first and the
    pipeline runs on the contraction.
    """
    if F is None or H is None:
        try:
            F, H = min_max_pair(M)
        except IsOTE:
            raise PreconditionFailed("no intersectable non-modular pair: the matroid is OTE") from None
    F, H = M.mask(F), M.mask(H)
    if H not in M.hyperplanes():
        raise PreconditionFailed(f"{M.fmt(H)} is not a hyperplane")
    if modular_defect(M, F, H) == 0 or not is_intersectable(M, F, H):
        raise NotIntersectable(f"{M.fmt(F)} and {M.fmt(H)} are not an intersectable pair")
    Flab, Hlab = M.labels_of(F), M.labels_of(H)
    C = F & H
    work = M
    if C:
        work = contract(M, C, name=f"{M.name or 'M'}/{{{' '.join(M.labels_of(C))}}}")
    kept = set(work.labels)
    cF = work.mask([lab for lab in Flab if lab in kept])
    cH = work.mask([lab for lab in Hlab if lab in kept])

    chain = reduce_defect_chain(work, cF, cH, prefix="_x")
    if chain.status != "complete":
        chain = reduce_defect_chain(work, cF, cH, prefix="_x", refresh=True)
    N1 = chain.result
    if modular_defect(N1, N1.closure(cF), N1.closure(cH)):
        raise ConstructionError(f"could not make the pair modular: {chain.note}")
    N1.name = f"{work.name or 'M'}-intersected"
    witness = nonsticky_witness(work, cF, cH)
    report = proper_amalgam(N1, witness.N)
    return NonstickyCertificate(M, Flab, Hlab, M.labels_of(C), work, chain, witness, report)


# -- embedding chains -------------------------------------------------------------------
def _pair_order(M: Matroid, pairs):
    return sorted(pairs, key=lambda p: (M.rank(p[0]), mask_key(p[0]), M.rank(p[1]), mask_key(p[1])))


def embed_ote_rank4(M: Matroid) -> ExtensionChain:
    """One pass over the disjoint coplanar line pairs of ``M``, intersecting
    each pair that is still intersectable."""
    if M.rank() != 4:
        raise PreconditionFailed(f"needs rank 4, got {M.rank()}")
    hm = is_hypermodular(M)
    if not hm:
        raise PreconditionFailed(
            f"not hypermodular: hyperplanes {M.fmt(hm.witness.X)} and {M.fmt(hm.witness.Y)} are not modular"
        )
    lines = list(M.lines())
    pairs = []
    for i, a in enumerate(lines):
        for b in lines[i + 1 :]:
            if not a & b and M.rank(a | b) == 3:
                pairs.append((a, b))
    pairs = _pair_order(M, pairs)
    chain = ExtensionChain(base=M, status=COMPLETE)
    cur = M
    skipped = 0
    base_lines = set(lines)
    base_planes = set(M.planes())
    for a, b in pairs:
        ca, cb = cur.closure(a), cur.closure(b)
        if modular_defect(cur, ca, cb) == 0 or not is_intersectable(cur, ca, cb):
            skipped += 1
            continue
        cut = generate_cut(cur, [ca, cb])
        label = cur.fresh_label("_p")
        nxt = crapo_extend(cur, cut, label, check=False)
        chain.steps.append(
            ChainStep(label, (cur.labels_of(ca), cur.labels_of(cb)), [cur.labels_of(F) for F in cut.minimal()], 0)
        )
        cur = nxt
        # every line and plane of the new matroid traces to one of M
        if any(L & M.ground not in base_lines for L in cur.lines()):
            raise ConstructionError(f"after adding {label} some line does not restrict to a line")
        if any(P & M.ground not in base_planes for P in cur.planes()):
            raise ConstructionError(f"after adding {label} some plane does not restrict to a plane")
    cur = cur.relabel({}, name=f"{M.name or 'M'}-ote")
    chain.result = cur
    chain.info = {"pairs_listed": len(pairs), "pairs_skipped": skipped}
    if cur.rank() != 4 or not is_hypermodular(cur):
        raise ConstructionError("result is not a hypermodular rank-4 matroid")
    ote = is_OTE(cur)
    if not ote:
        w = ote.witness
        raise ConstructionError(f"result is not OTE: {cur.fmt(w.X)} and {cur.fmt(w.Y)} are intersectable")
    chain.info["ote"] = True
    if not bundle_violations(M, cap=10**6):
        if not is_modular(cur):
            raise ConstructionError("bundle condition holds but the result is not modular")
        chain.info["modular"] = True
    else:
        chain.info["modular"] = bool(is_modular(cur))
    return chain


def _candidate_pairs(S: Matroid, hyperplanes_only: bool):
    """Incomparable flat pairs of ``S`` in (rank, elements) order."""
    if hyperplanes_only:
        flats = list(S.hyperplanes()) if S.rank() >= 2 else []
    else:
        flats = [F for k in range(1, S.rank()) for F in S.flats(k)]
    for i, F in enumerate(flats):
        for G in flats[i + 1 :]:
            if F & G != F and F & G != G:
                yield F, G


def count_intersectable_pairs(M: Matroid, cap: int | None = None) -> int:
    """Intersectable non-modular flat pairs, counting stops at ``cap``."""
    n = 0
    for F, G in _candidate_pairs(M, False):
        if modular_defect(M, F, G) and is_intersectable(M, F, G):
            n += 1
            if cap is not None and n >= cap:
                break
    return n


def _budgeted_completion(M: Matroid, budget: int, hyperplanes_only: bool, count_cap: int) -> ExtensionChain:
    chain = ExtensionChain(base=M, status=PARTIAL)
    cur = M
    used = 0
    passes = []
    while True:
        if hyperplanes_only:
            open_pairs = count_nonmodular_hyperplane_pairs(cur)
            done = open_pairs == 0
        else:
            done = bool(is_OTE(cur))
            open_pairs = 0 if done else None
        passes.append({"pass": len(passes) + 1, "elements": cur.n, "steps_so_far": used, "open_pairs": open_pairs})
        log.info("pass %d: %d elements, open pairs %s", len(passes), cur.n, open_pairs)
        if done:
            chain.status = COMPLETE
            break
        if used >= budget:
            break
        before = used
        # the pair list is fixed at the start of the pass; masks stay valid in extensions
        for X, Y in _candidate_pairs(cur, hyperplanes_only):
            if used >= budget:
                break
            # extend until the defect of this pair can no longer be decreased
            while used < budget:
                cX, cY = cur.closure(X), cur.closure(Y)
                if modular_defect(cur, cX, cY) == 0:
                    break
                cut = generate_cut(cur, [cX, cY])
                if cX & cY in cut:
                    break
                label = cur.fresh_label("_p")
                nxt = crapo_extend(cur, cut, label, check=False)
                chain.steps.append(
                    ChainStep(
                        label,
                        (cur.labels_of(cX), cur.labels_of(cY)),
                        [cur.labels_of(F) for F in cut.minimal()],
                        modular_defect(nxt, nxt.closure(cX), nxt.closure(cY)),
                    )
                )
                cur = nxt
                used += 1
        if used == before:
            chain.note = "a full pass made no progress"
            break
    if cur.rank() != M.rank():
        raise ConstructionError("rank changed along the chain")
    chain.result = cur
    chain.info = {"budget": budget, "steps_used": used, "passes": passes}
    if chain.status == PARTIAL:
        if hyperplanes_only:
            chain.info["remaining_pairs"] = passes[-1]["open_pairs"]
        else:
            n = count_intersectable_pairs(cur, cap=count_cap)
            chain.info["remaining_pairs"] = n
            chain.info["remaining_pairs_capped"] = n >= count_cap
    return chain


def embed_ote_general(M: Matroid, budget: int, count_cap: int = 1000) -> ExtensionChain:
    """Repeatedly intersect intersectable non-modular pairs; ``Complete``
    once the matroid is OTE, ``Partial`` when the step budget runs out.

    For a Partial result the remaining intersectable pairs are counted up to
    ``count_cap``.
    """
    if budget < 0:
        raise PreconditionFailed("budget must be non-negative")
    return _budgeted_completion(M, budget, False, count_cap)


def hypermodular_completion(M: Matroid, budget: int) -> ExtensionChain:
    """As :func:`embed_ote_general` with only hyperplane pairs listed;
    ``Complete`` once the matroid is hypermodular."""
    if budget < 0:
        raise PreconditionFailed("budget must be non-negative")
    return _budgeted_completion(M, budget, True, 0)
