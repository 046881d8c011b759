"""Ready-made planning instances: demos, analytic checks, random sampling.

The built-in demo runs a differential-drive vehicle along an S-shaped
cubic Bezier path whose curvature has two interior extrema. Case 1 uses
moderate velocity bounds and plans successfully; case 2 tightens the
angular-velocity bound until the velocity cap carves pockets the planner
cannot reconnect across, which exercises the failure detector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constraints import ConstraintProfile, unicycle_constraints
from .geometry import PathSpec, bezier_build, line_path, to_path_spec

__all__ = [
    "DEMO_CONTROL_POINTS",
    "DEMO_A_MAX",
    "CASE1_V_MAX",
    "CASE2_V_MAX",
    "UnicycleInstance",
    "demo_path",
    "demo_instance",
    "straight_instance",
    "random_unicycle_instance",
]

DEMO_CONTROL_POINTS = ((0.0, 0.0), (2.0, 2.0), (6.0, -1.5), (8.0, 0.0))
DEMO_A_MAX = (0.05, 0.1)
CASE1_V_MAX = (0.5, 1.3)
CASE2_V_MAX = (0.2, 1.3)


@dataclass(frozen=True)
class UnicycleInstance:
    path: PathSpec
    cp: ConstraintProfile
    v_max: tuple
    a_max: tuple
    label: str = "instance"


def demo_path(samples: int = 400) -> PathSpec:
    return to_path_spec(bezier_build(np.asarray(DEMO_CONTROL_POINTS), samples))


def demo_instance(case: int, samples: int = 400) -> UnicycleInstance:
    if case == 1:
        v_max = CASE1_V_MAX
    elif case == 2:
        v_max = CASE2_V_MAX
    else:
        raise ValueError("demo case must be 1 or 2")
    path = demo_path(samples)
    cp = unicycle_constraints(path, v_max, DEMO_A_MAX)
    return UnicycleInstance(path, cp, tuple(v_max), DEMO_A_MAX, label=f"demo-case-{case}")


def straight_instance(
    length: float = 5.0, v_max=CASE1_V_MAX, a_max=DEMO_A_MAX
) -> UnicycleInstance:
    path = line_path(length)
    cp = unicycle_constraints(path, v_max, a_max)
    return UnicycleInstance(path, cp, tuple(v_max), tuple(a_max), label="straight")


def random_unicycle_instance(rng: np.random.Generator, samples: int = 200) -> UnicycleInstance:
    """Sample a smooth random instance; bounds chosen so both planning
    success and velocity-cap failure occur across seeds."""
    span = rng.uniform(5.0, 9.0)
    x1 = rng.uniform(0.15, 0.45) * span
    x2 = rng.uniform(0.55, 0.85) * span
    y1 = rng.uniform(0.2, 0.6) * span * rng.choice([-1.0, 1.0])
    y2 = rng.uniform(0.2, 0.6) * span * rng.choice([-1.0, 1.0])
    pts = np.array([(0.0, 0.0), (x1, y1), (x2, y2), (span, 0.0)])
    v_max = (rng.uniform(0.12, 0.7), rng.uniform(0.7, 1.6))
    a_max = (rng.uniform(0.02, 0.12), rng.uniform(0.05, 0.25))
    path = to_path_spec(bezier_build(pts, samples))
    cp = unicycle_constraints(path, v_max, a_max)
    return UnicycleInstance(path, cp, v_max, a_max, label="random")
