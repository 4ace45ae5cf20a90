"""Newton polyhedra, non-degeneracy at infinity and asymptotic critical
values of polynomial maps over R, C and mixed (z, conj z) coordinates."""
from __future__ import annotations

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    InvertibilityVerdict,
    InvTag,
    NSet,
    compute_A,
    compute_N,
    invertibility_verdict,
    kinf_bound,
)
from .errors import GuardError, InputError, NewtonInfError, NotApplicable
from .fan import ConeRecord, DualSubdivision, dual_subdivision, strictness_check
from .nondegeneracy import (
    NDResult,
    Tag,
    Verdict,
    check_all_components_real,
    check_cone_nondegeneracy,
    compare_definitions,
    euler_transfer,
    is_nondegenerate_at_infinity,
)
from .numeric import (
    SearchConfig,
    cross_check_inclusions,
    milnor_residual,
    nu_mixed_formula,
    nu_at_point,
    search_asymptotic_values,
)
from .parsing import format_polynomial_map, parse_polynomial, parse_polynomial_map
from .poly import (
    QI,
    PolyMap,
    Polynomial,
    Setting,
    is_convenient,
    jacobian,
    jacobian_determinant,
    realify,
    support,
)
from .polytope import LatticePolytope, NewtonPolyhedron, faces_at_infinity, min_face
from .torus import TorusConfig

# names used in the published operation list
check_biviausina = check_all_components_real
rabier_nu = nu_at_point

__all__ = [
    "BoundReport",
    "ConeRecord",
    "DualSubdivision",
    "GuardError",
    "InputError",
    "InvTag",
    "InvertibilityVerdict",
    "LatticePolytope",
    "NDResult",
    "NSet",
    "NewtonInfError",
    "NewtonPolyhedron",
    "NotApplicable",
    "PolyMap",
    "Polynomial",
    "QI",
    "SearchConfig",
    "Setting",
    "Tag",
    "TorusConfig",
    "Verdict",
    "__version__",
    "check_all_components_real",
    "check_biviausina",
    "check_cone_nondegeneracy",
    "compare_definitions",
    "compute_A",
    "compute_N",
    "cross_check_inclusions",
    "dual_subdivision",
    "euler_transfer",
    "faces_at_infinity",
    "format_polynomial_map",
    "invertibility_verdict",
    "is_convenient",
    "is_nondegenerate_at_infinity",
    "jacobian",
    "jacobian_determinant",
    "kinf_bound",
    "milnor_residual",
    "min_face",
    "nu_mixed_formula",
    "parse_polynomial",
    "nu_at_point",
    "parse_polynomial_map",
    "rabier_nu",
    "realify",
    "search_asymptotic_values",
    "strictness_check",
    "support",
]
