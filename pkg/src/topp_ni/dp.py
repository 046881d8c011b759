"""Brute-force minimum-time oracle on a discretized phase plane.

Validation-only: value iteration backward over s stages on a rectangular
(s, squared-velocity) grid. From a node the reachable band at the next
stage spans the squared-velocity increments of the two extremal
accelerations (interval reachability, so interior accelerations are
represented); stage cost uses the mean of the endpoint velocities with a
small floor so trajectories that start or end at rest stay finite.

Deterministic and deliberately simple; not a planner.
"""

from __future__ import annotations

import numpy as np

from .constraints import (
    ConstraintProfile,
    alpha_from_rows,
    beta_from_rows,
    velocity_limit_on_grid,
)
from .limits import LimitCurves, mvc_squared_from_rows

__all__ = ["dp_min_time"]

_VEL_FLOOR = 1e-4


def dp_min_time(
    cp: ConstraintProfile,
    limits: LimitCurves,
    sdot0: float = 0.0,
    sdot_end: float = 0.0,
    n_s: int = 256,
    n_z: int = 256,
) -> float | None:
    """Minimum traversal time on the grid, or None when unreachable."""
    if n_s < 32 or n_z < 32:
        raise ValueError("n_s and n_z must be >= 32")
    s_end = cp.s_end
    s_nodes = np.linspace(0.0, s_end, n_s + 1)

    a, b, c = cp.accel_rows(s_nodes)
    z_cap, bad = mvc_squared_from_rows(a, b, c)
    if np.any(bad):
        return None
    vlim = velocity_limit_on_grid(cp, s_nodes)
    z_star = np.minimum(z_cap, np.square(vlim))

    finite = z_star[np.isfinite(z_star)]
    if finite.size == 0:
        raise ValueError("phase-plane grid is unbounded: no finite limit anywhere")
    z_max = float(np.max(finite))
    z_nodes = np.linspace(0.0, z_max, n_z)
    dz = z_nodes[1] - z_nodes[0]
    sd_nodes = np.sqrt(z_nodes)

    def nearest(z):
        return int(np.clip(round(z / dz), 0, n_z - 1))

    j_start = nearest(sdot0 * sdot0)
    j_goal = nearest(sdot_end * sdot_end)
    if z_nodes[j_start] > z_star[0] or z_nodes[j_goal] > z_star[-1]:
        raise ValueError("boundary velocity lies outside the admissible grid")

    cost = np.full(n_z, np.inf)
    cost[j_goal] = 0.0

    for i in range(n_s - 1, -1, -1):
        ds = s_nodes[i + 1] - s_nodes[i]
        s_mid = 0.5 * (s_nodes[i] + s_nodes[i + 1])
        am, bm, cm = cp.accel_rows(s_mid)
        am = am[:, None]
        bm = bm[:, None]
        cm = cm[:, None]
        acc_lo = alpha_from_rows(am, bm, cm, z_nodes)
        acc_hi = beta_from_rows(am, bm, cm, z_nodes)

        adm_here = z_nodes <= z_star[i] + 1e-12
        next_cost = np.where(z_nodes <= z_star[i + 1] + 1e-12, cost, np.inf)

        z_lo = z_nodes + 2.0 * acc_lo * ds
        z_hi = z_nodes + 2.0 * acc_hi * ds
        j_lo = np.clip(np.round(z_lo / dz), 0, n_z - 1).astype(int)
        j_hi = np.clip(np.round(z_hi / dz), 0, n_z - 1).astype(int)

        new_cost = np.full(n_z, np.inf)
        for j in range(n_z):
            if not adm_here[j] or j_hi[j] < j_lo[j]:
                continue
            sl = slice(j_lo[j], j_hi[j] + 1)
            pair = 0.5 * (sd_nodes[j] + sd_nodes[sl])
            stage = ds / np.maximum(pair, _VEL_FLOOR)
            total = stage + next_cost[sl]
            new_cost[j] = float(np.min(total))
        cost = new_cost

    result = cost[j_start]
    return float(result) if np.isfinite(result) else None
