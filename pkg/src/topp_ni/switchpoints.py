"""Switch-point candidates along the limit curve.

A deceleration-to-acceleration switch can only happen on the limit curve,
at one of three kinds of points:

* tangent        -- the limit-curve slope equals the profile slope
                    (which requires the two extremal accelerations to
                    coincide, so these live where the acceleration rows
                    bind, never where the velocity cap is strictly lower);
* discontinuity  -- the sampled limit curve jumps;
* zero-inertia   -- some acceleration row has A_i(s) = 0, so that row's
                    bound flips sides and the extremals are singular.

Candidates are detected once per (constraints, limits) pair on the limit
grid, refined by root finding, cached, and then filtered by the forward
search. Detection tolerances are scale-aware; see the individual
detectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .constraints import (
    ConstraintProfile,
    alpha,
    alpha_from_rows,
    beta,
    beta_from_rows,
    velocity_limit_on_grid,
)
from .limits import LimitCurves, mvc_at, mvc_squared_from_rows
from .profiles import PhasePoint

__all__ = ["SwitchPoint", "find_next_switch", "tangent_points_on_dagger"]

_TYPE_PRIORITY = {"tangent": 0, "discontinuity": 1, "zero-inertia": 2}
_TANGENT_TOL = 1e-6
_JUMP_FACTOR = 10.0
_JUMP_WINDOW = 25
_LEVEL_GUARD = 20.0


@dataclass(frozen=True)
class SwitchPoint:
    location: PhasePoint
    type: str
    source_curve: str  # "mvc" | "mvc_star"


def _mvc_batch(cp: ConstraintProfile, s_values: np.ndarray) -> np.ndarray:
    a, b, c = cp.accel_rows(s_values)
    z, bad = mvc_squared_from_rows(a, b, c)
    z = np.where(bad, 0.0, z)
    return np.sqrt(z)


def _zero_inertia_candidates(cp, limits) -> list[SwitchPoint]:
    grid = limits.grid
    a, _, _ = cp.accel_rows(grid)
    scale = np.maximum(1.0, np.max(np.abs(a), axis=1, keepdims=True))
    roots: list[float] = []
    for i in range(a.shape[0]):
        row = a[i] / scale[i, 0]
        sign_change = row[:-1] * row[1:] < 0.0
        for k in np.nonzero(sign_change)[0]:
            f = lambda s, _i=i: float(cp.accel_rows(float(s))[0][_i])
            roots.append(float(brentq(f, grid[k], grid[k + 1], xtol=1e-12 * limits.s_end)))
        for k in np.nonzero(row == 0.0)[0]:
            roots.append(float(grid[k]))
    roots.sort()
    merged: list[float] = []
    for r in roots:
        if not merged or r - merged[-1] > 1e-9 * limits.s_end:
            merged.append(r)
    curve = "mvc_star" if cp.has_velocity_rows else "mvc"
    return [
        SwitchPoint(PhasePoint(r, limits.limit_at(r)), "zero-inertia", curve)
        for r in merged
    ]


def _tangent_candidates(cp, limits) -> list[SwitchPoint]:
    grid = limits.grid
    h = limits.grid_h
    s_end = limits.s_end
    s_plus = np.clip(grid + h, 0.0, s_end)
    s_minus = np.clip(grid - h, 0.0, s_end)
    mvc = limits.mvc
    mvc_p = _mvc_batch(cp, s_plus)
    mvc_m = _mvc_batch(cp, s_minus)
    with np.errstate(invalid="ignore"):
        k_lim = (mvc_p - mvc_m) / (s_plus - s_minus)

    z_on = np.square(mvc)
    a, b, c = cp.accel_rows(grid)
    with np.errstate(invalid="ignore"):
        k_alpha = alpha_from_rows(a, b, c, z_on) / mvc
    g = k_lim - k_alpha

    def slope_at(s: float) -> float:
        hi = min(s_end, s + h)
        lo = max(0.0, s - h)
        return (mvc_at(cp, hi) - mvc_at(cp, lo)) / (hi - lo)

    def g_at(s: float) -> float:
        val = mvc_at(cp, s)
        return slope_at(s) - alpha(cp, s, val) / val

    cands: list[SwitchPoint] = []
    usable = np.isfinite(g)
    for k in range(len(grid) - 1):
        if not (usable[k] and usable[k + 1]) or g[k] * g[k + 1] >= 0.0:
            continue
        try:
            s_star = float(brentq(g_at, grid[k], grid[k + 1], xtol=1e-12 * s_end))
            val = mvc_at(cp, s_star)
        except ValueError:
            continue
        if not np.isfinite(val) or val <= 0.0:
            continue
        vcap = limits.vlim_at(s_star)
        if val > vcap + max(limits.eps_v, 1e-9 * val):
            continue  # the acceleration curve dips below the velocity cap elsewhere
        k_l = slope_at(s_star)
        tol = _TANGENT_TOL * (1.0 + abs(k_l))
        k_a = alpha(cp, s_star, val) / val
        k_b = beta(cp, s_star, val) / val
        if abs(k_l - k_a) <= tol and abs(k_l - k_b) <= tol:
            curve = "mvc_star" if cp.has_velocity_rows else "mvc"
            cands.append(SwitchPoint(PhasePoint(s_star, val), "tangent", curve))

    merged: list[SwitchPoint] = []
    for cand in sorted(cands, key=lambda c: c.location.s):
        if not merged or cand.location.s - merged[-1].location.s > 1e-7 * s_end:
            merged.append(cand)
    return merged


def _discontinuity_candidates(cp, limits) -> list[SwitchPoint]:
    v = limits.mvc_star
    grid = limits.grid
    jumps = np.abs(np.diff(v))
    finite_pair = np.isfinite(v[:-1]) & np.isfinite(v[1:])
    finite_vals = v[np.isfinite(v)]
    if finite_vals.size == 0:
        return []
    level_guard = _LEVEL_GUARD * float(np.median(finite_vals))
    floor = 1e-9 * limits.velocity_scale

    finite_jumps = jumps[finite_pair & np.isfinite(jumps)]
    if finite_jumps.size == 0:
        return []
    global_median = float(np.median(finite_jumps))
    shortlist = np.nonzero(
        finite_pair & (jumps > _JUMP_FACTOR * max(global_median, floor))
    )[0]

    curve = "mvc_star" if cp.has_velocity_rows else "mvc"
    cands: list[SwitchPoint] = []
    for k in shortlist:
        lo = max(0, k - _JUMP_WINDOW)
        hi = min(len(jumps), k + _JUMP_WINDOW + 1)
        window = jumps[lo:hi]
        window = window[np.isfinite(window)]
        window = window[window != jumps[k]] if window.size > 1 else window
        local_median = float(np.median(window)) if window.size else 0.0
        if jumps[k] <= _JUMP_FACTOR * max(local_median, floor):
            continue
        if min(v[k], v[k + 1]) > level_guard:
            continue  # smooth blow-up flank, not a jump between levels
        idx = k if v[k] <= v[k + 1] else k + 1
        cands.append(
            SwitchPoint(PhasePoint(float(grid[idx]), float(v[idx])), "discontinuity", curve)
        )
    return cands


def _candidates(cp: ConstraintProfile, limits: LimitCurves) -> list[SwitchPoint]:
    if limits._switch_cache is None:
        cands = (
            _tangent_candidates(cp, limits)
            + _discontinuity_candidates(cp, limits)
            + _zero_inertia_candidates(cp, limits)
        )
        cands.sort(key=lambda c: (c.location.s, _TYPE_PRIORITY[c.type]))
        limits._switch_cache = cands
    return limits._switch_cache


def find_next_switch(cp: ConstraintProfile, limits: LimitCurves, from_s: float) -> SwitchPoint | None:
    """First switch-point candidate strictly beyond ``from_s``.

    Ties at the same location resolve tangent before discontinuity before
    zero-inertia. Returns None when nothing lies before the path end.
    """
    eps = 1e-9 * limits.s_end
    for cand in _candidates(cp, limits):
        if from_s + eps < cand.location.s < limits.s_end - eps:
            return cand
    return None


def tangent_points_on_dagger(limits: LimitCurves, cp: ConstraintProfile) -> list[SwitchPoint]:
    """Tangent candidates strictly inside velocity-bound segments.

    Wherever the velocity cap is strictly below the acceleration-implied
    curve the two extremal slopes differ, so a point tangent to both
    profiles cannot exist; this scan asserts that numerically and is
    expected to return an empty list.
    """
    grid = limits.grid
    h = limits.grid_h
    s_end = limits.s_end
    found: list[SwitchPoint] = []
    a, b, c = cp.accel_rows(grid)
    vals = limits.mvc_star
    z_on = np.square(vals)
    with np.errstate(invalid="ignore"):
        k_a = alpha_from_rows(a, b, c, z_on) / vals
        k_b = beta_from_rows(a, b, c, z_on) / vals

    s_plus = np.clip(grid + h, 0.0, s_end)
    s_minus = np.clip(grid - h, 0.0, s_end)
    star_p = np.minimum(_mvc_batch(cp, s_plus), velocity_limit_on_grid(cp, s_plus))
    star_m = np.minimum(_mvc_batch(cp, s_minus), velocity_limit_on_grid(cp, s_minus))
    with np.errstate(invalid="ignore"):
        k_lim = (star_p - star_m) / (s_plus - s_minus)

    for lo, hi in limits.dagger_segments:
        inside = np.nonzero((grid > lo + 1e-12) & (grid < hi - 1e-12))[0]
        for k in inside:
            if not (np.isfinite(vals[k]) and vals[k] > 0.0 and np.isfinite(k_lim[k])):
                continue
            tol = _TANGENT_TOL * (1.0 + abs(k_lim[k]))
            if abs(k_lim[k] - k_a[k]) <= tol and abs(k_lim[k] - k_b[k]) <= tol:
                found.append(
                    SwitchPoint(PhasePoint(float(grid[k]), float(vals[k])), "tangent", "mvc_star")
                )
    return found
