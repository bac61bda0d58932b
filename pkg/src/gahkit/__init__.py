"""gahkit: Poincare sections, return maps and horseshoe trapping regions.

A toolkit for locating and verifying quadrilateral trapping regions of
3D flows: adaptive integration with dense output, rotated section planes,
first-return and iterated Poincare maps, containment verification, a
hand-built flow whose full-rotation return map is a horseshoe, and a fast
planar horseshoe diffeomorphism for map-level experiments.
"""
from .dynsys import (
    IntegratorConfig,
    RosslerParams,
    State3,
    Trajectory,
    integrate,
    make_rossler_rhs,
    rossler_field,
    rossler_jacobian,
    rotate_frame,
)
from .errors import (
    AmbiguousBranch,
    ConfigError,
    EmptyTrajectory,
    GahkitError,
    NoConvergence,
    NoFixedPoint,
    NonFiniteState,
    NoReturn,
    OutOfDomain,
    SingularJacobian,
    StepSizeUnderflow,
)
from .gah_model import (
    GahModelParams,
    RectRegion,
    check_star,
    gah_apply,
    iterate_region,
    straight_leg_fixed_point,
)
from .gah_system import (
    CylState,
    FoldCoords,
    TransversalSquare,
    fold_closed_form,
    fold_field,
    gah_field,
    gah_poincare_image,
    make_gah_rhs,
    sigma,
    stretch_squeeze_closed_form,
    stretch_squeeze_field,
    xi,
)
from .section import (
    Crossing,
    ReturnMapResult,
    SectionPlane,
    find_crossings,
    find_fixed_point,
    first_return,
    fixed_point_of_map,
    iterate_map,
    iterate_map_batch,
)
from .trapping import (
    ContainmentReport,
    Quadrilateral,
    approximate_attractor,
    discretize_edges,
    point_in_polygon,
    verify_trapping,
)

__version__ = "0.1.0"

__all__ = [
    "State3",
    "RosslerParams",
    "IntegratorConfig",
    "Trajectory",
    "rossler_field",
    "rossler_jacobian",
    "make_rossler_rhs",
    "integrate",
    "rotate_frame",
    "CylState",
    "FoldCoords",
    "TransversalSquare",
    "sigma",
    "xi",
    "stretch_squeeze_field",
    "stretch_squeeze_closed_form",
    "fold_field",
    "fold_closed_form",
    "gah_field",
    "make_gah_rhs",
    "gah_poincare_image",
    "SectionPlane",
    "Crossing",
    "ReturnMapResult",
    "find_crossings",
    "first_return",
    "iterate_map",
    "iterate_map_batch",
    "find_fixed_point",
    "fixed_point_of_map",
    "Quadrilateral",
    "ContainmentReport",
    "discretize_edges",
    "point_in_polygon",
    "verify_trapping",
    "approximate_attractor",
    "GahModelParams",
    "RectRegion",
    "gah_apply",
    "straight_leg_fixed_point",
    "check_star",
    "iterate_region",
    "GahkitError",
    "StepSizeUnderflow",
    "NonFiniteState",
    "EmptyTrajectory",
    "NoReturn",
    "NoConvergence",
    "SingularJacobian",
    "AmbiguousBranch",
    "OutOfDomain",
    "NoFixedPoint",
    "ConfigError",
]
