"""Modular cuts and single-element extensions."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

from .core import Matroid, bits, mask_key
from .errors import (
    InvalidCut,
    IsOTE,
    LabelClash,
    NotAFlat,
    NotIntersectable,
    NotNonModular,
    TooLarge,
)
from .modularity import FlatPair, PropertyResult, modular_defect

log = logging.getLogger(__name__)

DEFAULT_CUT_ENUM_BOUND = 18


@dataclass(frozen=True)
class ModularCut:
    host: Matroid
    members: frozenset

    def __contains__(self, F) -> bool:
        return F in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.sorted())

    def sorted(self) -> list[int]:
        M = self.host
        return sorted(self.members, key=lambda F: (M.flat_rank(F), mask_key(F)))

    def minimal(self) -> list[int]:
        ms = self.sorted()
        return [F for F in ms if not any(G != F and G & F == G for G in ms)]

    def labels(self) -> list[tuple[str, ...]]:
        return [self.host.labels_of(F) for F in self.sorted()]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModularCut):
            return NotImplemented
        return self.host is other.host and self.members == other.members or (
            self.host == other.host and self.members == other.members
        )

    def __hash__(self) -> int:
        return hash(self.members)


def _as_flat(M: Matroid, F) -> int:
    F = M.mask(F)
    if not M.is_flat(F):
        raise NotAFlat(f"{M.fmt(F)} is not a flat")
    return F


def principal_cut(M: Matroid, F) -> ModularCut:
    F = _as_flat(M, F)
    return ModularCut(M, frozenset(M.flats_above(F)))


def _closure_fixpoint(M: Matroid, seed: Iterable[int], stop_at: int | None):
    """Least family containing ``seed`` that is upward closed and closed under
    intersections of modular member pairs.  Returns (members, hit_stop)."""
    members: set[int] = set()
    queue: list[int] = []
    levels = M.flats_by_rank
    top = M.rank()

    def add(F: int) -> None:
        for k in range(M.flat_rank(F), top + 1):
            level = levels[k]
            for pos in bits(M.containing(F, k)):
                G = level[pos]
                if G not in members:
                    members.add(G)
                    queue.append(G)

    for F in sorted(seed, key=lambda F: (M.flat_rank(F), mask_key(F))):
        if F not in members:
            add(F)
    processed: list[int] = []
    pos = 0
    while pos < len(queue):
        if stop_at is not None and stop_at in members:
            return members, True
        F = queue[pos]
        pos += 1
        for G in processed:
            inter = F & G
            if inter in members:
                continue
            if modular_defect(M, F, G) == 0:
                add(inter)
        processed.append(F)
    return members, stop_at is not None and stop_at in members


def generate_cut(M: Matroid, seed) -> ModularCut:
    """Smallest modular cut containing every flat in ``seed``."""
    flats = [_as_flat(M, F) for F in seed]
    if not flats:
        return ModularCut(M, frozenset())
    members, _ = _closure_fixpoint(M, flats, None)
    return ModularCut(M, frozenset(members))


def is_modular_cut(M: Matroid, members: Iterable[int]) -> bool:
    members = set(members)
    if not members:
        return True
    if any(not M.is_flat(F) for F in members):
        return False
    closed, _ = _closure_fixpoint(M, members, None)
    return closed == members


def make_cut(M: Matroid, flats) -> ModularCut:
    """Wrap a family of flats as a cut, raising InvalidCut when it is not one."""
    members = frozenset(_as_flat(M, F) for F in flats)
    if not is_modular_cut(M, members):
        raise InvalidCut("family is not upward closed or misses a modular intersection")
    return ModularCut(M, members)


def is_principal(cut: ModularCut) -> int | None:
    if not cut.members:
        return None
    F = cut.host.ground
    for G in cut.members:
        F &= G
    return F if F in cut.members else None


def is_intersectable(M: Matroid, X, Y) -> bool:
    """Whether some extension decreases the defect of the non-modular pair.

    Equivalent to ``X ∩ Y`` missing from the cut generated by ``X`` and ``Y``
    (that cut always lies inside the principal cut of ``X ∩ Y``).
    """
    X, Y = _as_flat(M, X), _as_flat(M, Y)
    if modular_defect(M, X, Y) == 0:
        raise NotNonModular(f"{M.fmt(X)} and {M.fmt(Y)} form a modular pair")
    inter = X & Y
    _, hit = _closure_fixpoint(M, [X, Y], inter)
    return not hit


def crapo_extend(M: Matroid, cut: ModularCut, label: str | None = None, *, check: bool = True, name=None) -> Matroid:
    """Single-element extension ``M +_cut p``.

    The flats of the extension are ``F`` (``F`` not in the cut), ``F ∪ p``
    (``F`` in the cut, same rank) and ``F ∪ p`` with rank ``r(F) + 1`` for
    flats outside the cut none of whose covers is in the cut.
    """
    if cut.host is not M and cut.host != M:
        raise InvalidCut("cut belongs to a different matroid")
    if check and not is_modular_cut(M, cut.members):
        raise InvalidCut("family is not a modular cut")
    label = label or M.fresh_label()
    if label in M.labels:
        raise LabelClash(f"label {label!r} already used")
    p = 1 << M.n
    top = M.rank() if cut.members else M.rank() + 1
    levels: list[list[int]] = [[] for _ in range(top + 1)]
    members = cut.members
    in_cut = [0] * (M.rank() + 2)
    for F in members:
        in_cut[M.flat_rank(F)] |= 1 << M.position(F)
    for k, level in enumerate(M.flats_by_rank):
        for F in level:
            if F in members:
                levels[k].append(F | p)
            else:
                levels[k].append(F)
                # F ∪ p is a flat unless some cover of F lies in the cut
                if k == M.rank() or not M.containing(F, k + 1) & in_cut[k + 1]:
                    levels[k + 1].append(F | p)
    return Matroid(M.labels + (label,), levels, name=name or M.name)


def cut_of_extension(N: Matroid, label: str) -> ModularCut:
    """The cut of ``N \\ label`` that ``N`` realizes (flats spanning the point)."""
    from .core import delete

    M = delete(N, [label])
    p = N.mask([label])
    members = []
    for F in M.all_flats():
        FN = N.mask(M.labels_of(F))
        if N.closure(FN) & p:
            members.append(F)
    return ModularCut(M, frozenset(members))


@dataclass
class ChainStep:
    label: str
    generators: tuple[tuple[str, ...], ...]
    cut: list[tuple[str, ...]]
    defect_after: int | None = None

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "generators": [list(g) for g in self.generators],
            "cut_minimal": [list(c) for c in self.cut],
            "defect_after": self.defect_after,
        }


@dataclass
class ExtensionChain:
    base: Matroid
    steps: list[ChainStep] = field(default_factory=list)
    result: Matroid | None = None
    status: str = "complete"
    note: str = ""
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.result is None:
            self.result = self.base

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def new_labels(self) -> list[str]:
        return [s.label for s in self.steps]

    def log(self) -> dict:
        return {
            "base": self.base.name,
            "base_elements": list(self.base.labels),
            "status": self.status,
            "note": self.note,
            "steps": [s.as_dict() for s in self.steps],
            "result_elements": self.result.n,
            "result_rank": self.result.rank(),
            **self.info,
        }


def _step(M: Matroid, cut: ModularCut, label: str, gens, defect=None) -> ChainStep:
    return ChainStep(
        label=label,
        generators=tuple(M.labels_of(g) for g in gens),
        cut=[M.labels_of(F) for F in cut.minimal()],
        defect_after=defect,
    )


def reduce_defect_chain(
    M: Matroid,
    X,
    Y,
    labels: Iterable[str] | None = None,
    prefix: str = "_p",
    *,
    refresh: bool = False,
) -> ExtensionChain:
    """Extend until the closures of ``X`` and ``Y`` form a modular pair.

    Each step uses the closure-image of the cut generated by ``X`` and ``Y``
    in ``M``.  If an image family fails to be a modular cut the chain stops
    with status ``"stopped_early"``, unless ``refresh`` is set, in which case
    the cut is regenerated from the current closures.
    """
    X, Y = _as_flat(M, X), _as_flat(M, Y)
    if modular_defect(M, X, Y) == 0:
        raise NotIntersectable(f"{M.fmt(X)} and {M.fmt(Y)} are already a modular pair")
    cut0 = generate_cut(M, [X, Y])
    if X & Y in cut0:
        raise NotIntersectable(f"{M.fmt(X)} and {M.fmt(Y)} are not intersectable")
    label_iter = iter(labels) if labels is not None else None
    chain = ExtensionChain(base=M)
    cur, cut = M, cut0
    d = modular_defect(M, X, Y)
    while d > 0:
        label = next(label_iter, None) if label_iter is not None else None
        label = label or cur.fresh_label(prefix)
        nxt = crapo_extend(cur, cut, label, check=False)
        cX, cY = nxt.closure(X), nxt.closure(Y)
        nd = modular_defect(nxt, cX, cY)
        chain.steps.append(_step(cur, cut, label, (cur.closure(X), cur.closure(Y)), nd))
        if nd != d - 1:
            chain.status = "stopped_early"
            chain.note = f"defect went from {d} to {nd}"
            cur = nxt
            break
        cur, d = nxt, nd
        if d == 0:
            break
        image = {cur.closure(F) for F in cut0.members}
        if is_modular_cut(cur, image):
            cut = ModularCut(cur, frozenset(image))
            continue
        if not refresh:
            chain.status = "stopped_early"
            chain.note = "closure image of the generated cut is not a modular cut"
            break
        cut = generate_cut(cur, [cX, cY])
        if cX & cY in cut:
            chain.status = "stopped_early"
            chain.note = "pair is no longer intersectable"
            break
    chain.result = cur
    return chain


def _ordered_pairs_by_key(M: Matroid):
    flats = [F for k in range(1, M.rank()) for F in M.flats(k)]
    cands = []
    for F in flats:
        for G in flats:
            if F == G or F & G == F or F & G == G:
                continue
            d = modular_defect(M, F, G)
            if d:
                cands.append((d, M.flat_rank(F), -M.flat_rank(G), mask_key(F), mask_key(G), F, G))
    cands.sort()
    return cands


def min_max_pair(M: Matroid) -> tuple[int, int]:
    """Intersectable pair ``(F, H)`` of least defect, ``F`` of least rank and
    ``H`` of greatest rank; ``H`` is a hyperplane and ``F`` is minimal in the
    cut generated by ``F`` and ``H``."""
    memo: dict[tuple[int, int], bool] = {}
    hyper = set(M.hyperplanes())
    for *_, F, G in _ordered_pairs_by_key(M):
        key = (min(F, G), max(F, G))
        if key not in memo:
            memo[key] = is_intersectable(M, F, G)
        if not memo[key] or G not in hyper:
            continue
        cut = generate_cut(M, [F, G])
        if any(C != F and C & F == C for C in cut.members):
            continue
        return F, G
    raise IsOTE("no intersectable non-modular pair")


def is_OTE(M: Matroid) -> PropertyResult:
    """OTE iff no non-modular pair of flats is intersectable.

    (A non-principal non-empty cut has two members whose intersection is
    outside it; such a pair is non-modular and its generated cut sits inside
    the given one.)  Hyperplane pairs are scanned first.
    """
    proper = [F for k in range(1, M.rank()) for F in M.flats(k)]
    hyper = list(M.hyperplanes()) if M.rank() >= 2 else []
    seen = set()

    def scan(flats):
        for i, F in enumerate(flats):
            for G in flats[i + 1 :]:
                if F & G == F or F & G == G or (F, G) in seen:
                    continue
                seen.add((F, G))
                d = modular_defect(M, F, G)
                if d and is_intersectable(M, F, G):
                    return FlatPair(F, G, d)
        return None

    w = scan(hyper) or scan(proper)
    return PropertyResult(w is None, w)


def enumerate_modular_cuts(M: Matroid, bound: int = DEFAULT_CUT_ENUM_BOUND) -> list[ModularCut]:
    """Every modular cut, by filtering all upward closed families of flats."""
    flats = M.all_flats()
    if len(flats) > bound:
        raise TooLarge(f"{len(flats)} flats exceed the enumeration bound {bound}")
    order = sorted(flats, key=lambda F: (-M.flat_rank(F), mask_key(F)))
    out: list[ModularCut] = []

    def rec(i: int, chosen: frozenset):
        if i == len(order):
            if is_modular_cut(M, chosen):
                out.append(ModularCut(M, chosen))
            return
        F = order[i]
        rec(i + 1, chosen)
        if all(G in chosen for G in M.covers(F)):
            rec(i + 1, chosen | {F})

    rec(0, frozenset())
    out.sort(key=lambda c: (len(c), sorted(mask_key(F) for F in c.members)))
    return out
