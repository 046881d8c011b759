"""Time-optimal velocity profiles along fixed paths.

Plan in the (path coordinate, path velocity) phase plane: transform
actuator bounds into extremal path accelerations, fuse the resulting
velocity ceiling with direct velocity caps, chain maximal acceleration
and deceleration profiles through switch points, and diagnose the cases
the chaining cannot solve.
"""

from .constraints import (
    ConstraintProfile,
    GeneralizedDynamics,
    alpha,
    beta,
    from_generalized_dynamics,
    tabulated_constraints,
    unicycle_constraints,
    velocity_limit,
)
from .dp import dp_min_time
from .geometry import (
    BezierPath,
    PathSpec,
    bezier_build,
    circle_path,
    line_path,
    to_path_spec,
)
from .limits import LimitCurves, compute_limit_curves
from .planner import (
    NiFailureError,
    Property6Report,
    RtReport,
    Trajectory,
    UntraversableError,
    check_property6,
    ni_plan,
    rt_detect,
    torque_only_trajectory,
)
from .profiles import (
    PhasePoint,
    PhaseProfile,
    Termination,
    integrate_alpha,
    integrate_beta,
    intersect_profiles,
)
from .switchpoints import SwitchPoint, find_next_switch, tangent_points_on_dagger

__version__ = "0.1.0"

__all__ = [
    "BezierPath",
    "ConstraintProfile",
    "GeneralizedDynamics",
    "LimitCurves",
    "NiFailureError",
    "PathSpec",
    "PhasePoint",
    "PhaseProfile",
    "Property6Report",
    "RtReport",
    "SwitchPoint",
    "Termination",
    "Trajectory",
    "UntraversableError",
    "alpha",
    "beta",
    "bezier_build",
    "check_property6",
    "circle_path",
    "compute_limit_curves",
    "dp_min_time",
    "find_next_switch",
    "from_generalized_dynamics",
    "integrate_alpha",
    "integrate_beta",
    "intersect_profiles",
    "line_path",
    "ni_plan",
    "rt_detect",
    "tabulated_constraints",
    "tangent_points_on_dagger",
    "to_path_spec",
    "torque_only_trajectory",
    "unicycle_constraints",
    "velocity_limit",
]
