"""Weighted Morse homotopy on the moment polytope of a Hirzebruch surface F_k,
compared with line-bundle data on the surface."""

from .ainfinity import GradientTree, line_integral, m1, m1_pair, m2, trace_trajectory
from .errors import (
    BudgetExceeded,
    CompositionTypeError,
    HMSError,
    M1Violation,
    MissingTarget,
    NonAdjacentDegrees,
    NotInPolytope,
    UnboundedPotential,
)
from .geometry import (
    BasePoint,
    HirzebruchModel,
    MomentPolytope,
    boundary_stratum,
    invert_moment,
    kaehler_potential,
    metric_inverse,
    moment_map,
)
from .lagrangian import (
    BundleLabel,
    LagrangianLabel,
    MorphismIndex,
    PotentialData,
    f_raw,
    gradient_field,
    normalize,
    potential,
    section_map,
)
from .morse import (
    ComponentGeometry,
    HomSpace,
    MorphismGenerator,
    check_M2,
    degree_of,
    hom_space,
    solve_components,
)
from .verify import (
    ExceptionalCollection,
    VerificationReport,
    nonminimality_demo,
    product_coefficient,
    sheaf_basis,
    verify_hms,
)

__version__ = "0.1.0"

__all__ = [
    "BasePoint",
    "BudgetExceeded",
    "BundleLabel",
    "ComponentGeometry",
    "CompositionTypeError",
    "ExceptionalCollection",
    "GradientTree",
    "HMSError",
    "HirzebruchModel",
    "HomSpace",
    "LagrangianLabel",
    "M1Violation",
    "MissingTarget",
    "MomentPolytope",
    "MorphismGenerator",
    "MorphismIndex",
    "NonAdjacentDegrees",
    "NotInPolytope",
    "PotentialData",
    "UnboundedPotential",
    "VerificationReport",
    "boundary_stratum",
    "check_M2",
    "degree_of",
    "f_raw",
    "gradient_field",
    "hom_space",
    "invert_moment",
    "kaehler_potential",
    "line_integral",
    "m1",
    "m1_pair",
    "m2",
    "metric_inverse",
    "moment_map",
    "nonminimality_demo",
    "normalize",
    "potential",
    "product_coefficient",
    "section_map",
    "sheaf_basis",
    "solve_components",
    "trace_trajectory",
    "verify_hms",
]
