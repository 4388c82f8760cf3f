"""Combinatorial Poincaré duality and Lefschetz coincidence theory on
triangulated closed manifolds, with exact integer arithmetic throughout.

The usual entry points are re-exported here; the full API lives in the
submodules (complexes, homology, duality, products, plmaps, coincidence,
catalog, io, cli).
"""

from . import catalog
from .coincidence import (
    coincidence_report,
    global_class,
    lefschetz_number,
    local_class,
    multi_coincidence_report,
)
from .complexes import OrientedComplex, SimplicialMap, Subcomplex, build_complex
from .duality import DualityContext, shared_context, thom_class
from .errors import InputError, PreconditionError, VerificationError
from .homology import all_homology, homology
from .plmaps import PLMap, coincidence_set

__version__ = "0.1.0"

__all__ = [
    "DualityContext",
    "InputError",
    "OrientedComplex",
    "PLMap",
    "PreconditionError",
    "SimplicialMap",
    "Subcomplex",
    "VerificationError",
    "all_homology",
    "build_complex",
    "catalog",
    "coincidence_report",
    "coincidence_set",
    "global_class",
    "homology",
    "lefschetz_number",
    "local_class",
    "multi_coincidence_report",
    "shared_context",
    "thom_class",
]
