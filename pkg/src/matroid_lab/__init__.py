"""Finite matroids: modular cuts, single-element extensions, proper amalgams and embeddings."""

import sys as _sys

from .amalgam import build_context, eta_violation_anatomy, proper_amalgam, verify_amalgam, xi
from .constructions import (
    embed_ote_general,
    embed_ote_rank4,
    hypermodular_completion,
    nonsticky_certificate,
    nonsticky_witness,
)
from .core import (
    Matroid,
    are_isomorphic,
    check_matroid_axioms,
    contract,
    delete,
    load_matroid,
    minor,
    parse_matroid,
    restrict,
    serialize_matroid,
)
from .cuts import (
    ModularCut,
    crapo_extend,
    enumerate_modular_cuts,
    generate_cut,
    is_intersectable,
    is_OTE,
    min_max_pair,
    principal_cut,
    reduce_defect_chain,
)
from .errors import MatroidError
from .modularity import (
    bundle_violations,
    check_escher,
    is_hypermodular,
    is_modular,
    line_partition,
    modular_defect,
)
from .named import gen_named, pg3, pg3_minus_point, uniform, vamos

__all__ = [
    name for name, obj in list(globals().items()) if not name.startswith("_") and not isinstance(obj, type(_sys))
]
del _sys
