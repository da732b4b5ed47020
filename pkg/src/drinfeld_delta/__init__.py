"""Exact z-adic invariants of Drinfeld-style z-power modules.

The payload: canonical characters on the jet kernels, the splitting number m
with its lambda parameters, the gamma invariant, the canonical-lift
criterion, the semilinear operator on the character module, and the
slope/Hodge verdict of the attached isocrystal -- all at a user-chosen
z-precision with certified residual floors.
"""

from .errors import (
    DecayCertificateMissing,
    DivisionByZero,
    DrinfeldDeltaError,
    Inconsistent,
    NotAdmissible,
    NotDivisible,
    NotInSStar,
    ParseError,
    PrecisionExhausted,
    Undecided,
    UnsupportedDimension,
    ValidationError,
)
from .ffield import Field, find_irreducible, is_irreducible
from .series import Series, SeriesRing
from .twisted import (
    AndersonModule,
    DrinfeldModule,
    TwistedSeries,
    hstack,
    motive_reconstruct,
    motive_reduce,
    s_star_invert,
    stack,
)
from .jets import (
    canonical_character,
    eta_slice,
    ghost_map,
    ghost_solve,
    jet_action,
    jet_frobenius,
    nu1,
    nu1_residual,
)
from .invariants import (
    DeltaInvariants,
    ExtClass,
    cl_coefficients,
    compute_invariants,
    ext_reduce,
    f_star_matrix,
    order_zero_infeasibility,
    splitting_data,
    verify_identities,
)
from .isocrystal import (
    UPoly,
    hodge_filtration,
    hodge_pink_lattice,
    newton_data,
    newton_slopes,
    weak_admissibility,
)

__version__ = "0.1.0"

__all__ = [
    "AndersonModule",
    "DecayCertificateMissing",
    "DeltaInvariants",
    "DivisionByZero",
    "DrinfeldDeltaError",
    "DrinfeldModule",
    "ExtClass",
    "Field",
    "Inconsistent",
    "NotAdmissible",
    "NotDivisible",
    "NotInSStar",
    "ParseError",
    "PrecisionExhausted",
    "Series",
    "SeriesRing",
    "TwistedSeries",
    "UPoly",
    "Undecided",
    "UnsupportedDimension",
    "ValidationError",
    "canonical_character",
    "cl_coefficients",
    "compute_invariants",
    "eta_slice",
    "ext_reduce",
    "f_star_matrix",
    "find_irreducible",
    "is_irreducible",
    "ghost_map",
    "ghost_solve",
    "hodge_filtration",
    "hodge_pink_lattice",
    "hstack",
    "jet_action",
    "jet_frobenius",
    "motive_reconstruct",
    "motive_reduce",
    "newton_data",
    "newton_slopes",
    "order_zero_infeasibility",
    "nu1",
    "nu1_residual",
    "s_star_invert",
    "splitting_data",
    "stack",
    "verify_identities",
    "weak_admissibility",
]
