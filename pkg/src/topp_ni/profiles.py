"""Extremal phase-plane profiles and their intersections.

Profiles are integrated in squared-velocity coordinates ``z = sdot**2``
where the dynamics ``dz/ds = 2 * accel(s, sqrt(z))`` stay regular through
``sdot = 0`` (the velocity-slope form ``accel/sdot`` does not). A profile
is a classical fixed-step RK4 trace that terminates on the first of:
crossing the sampled limit curve, reaching ``sdot = 0``, or reaching the
end of its integration domain. Limit crossings are refined by bisection
over the offending step; a ``z < 0`` step is backtracked linearly.

Samples are always stored with strictly increasing ``s`` regardless of
integration direction. All functions here are pure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .constraints import ConstraintProfile
from .limits import LimitCurves

__all__ = [
    "Termination",
    "PhasePoint",
    "PhaseProfile",
    "integrate_beta",
    "integrate_alpha",
    "intersect_profiles",
]

DEFAULT_STEP_COUNT = 4000


class Termination(enum.Enum):
    HIT_LIMIT = "hit-mvc-star"
    HIT_SDOT_ZERO = "hit-sdot-zero"
    HIT_S0 = "hit-s0"
    HIT_SE = "hit-se"
    INTERSECTED = "intersected-profile"


@dataclass(frozen=True)
class PhasePoint:
    s: float
    sdot: float

    @property
    def z(self) -> float:
        return self.sdot * self.sdot


@dataclass(frozen=True)
class PhaseProfile:
    """Sampled extremal profile; ``s`` strictly increasing, ``z = sdot**2``."""

    kind: str                 # "alpha" | "beta"
    direction: str            # "forward" | "backward"
    s: np.ndarray
    z: np.ndarray
    termination: Termination

    @property
    def sdot(self) -> np.ndarray:
        return np.sqrt(np.maximum(self.z, 0.0))

    @property
    def s_lo(self) -> float:
        return float(self.s[0])

    @property
    def s_hi(self) -> float:
        return float(self.s[-1])

    @property
    def start(self) -> PhasePoint:
        """Integration start in travel order."""
        i = 0 if self.direction == "forward" else -1
        return PhasePoint(float(self.s[i]), math.sqrt(max(self.z[i], 0.0)))

    @property
    def end(self) -> PhasePoint:
        """Integration end in travel order (the termination point)."""
        i = -1 if self.direction == "forward" else 0
        return PhasePoint(float(self.s[i]), math.sqrt(max(self.z[i], 0.0)))

    def z_at(self, s):
        return np.interp(s, self.s, self.z)

    def point_at(self, s: float) -> PhasePoint:
        return PhasePoint(float(s), math.sqrt(max(float(self.z_at(s)), 0.0)))

    def slice_between(self, lo: float, hi: float) -> "PhaseProfile":
        """Restrict to [lo, hi] with interpolated endpoint samples."""
        lo = max(lo, self.s_lo)
        hi = min(hi, self.s_hi)
        mask = (self.s > lo) & (self.s < hi)
        s = np.concatenate([[lo], self.s[mask], [hi]])
        z = np.concatenate([[self.z_at(lo)], self.z[mask], [self.z_at(hi)]])
        keep = np.concatenate([[True], np.diff(s) > 0.0])
        return replace(self, s=s[keep], z=z[keep])


def _rk4(f, s, z, h):
    k1 = f(s, z)
    k2 = f(s + 0.5 * h, z + 0.5 * h * k1)
    k3 = f(s + 0.5 * h, z + 0.5 * h * k2)
    k4 = f(s + h, z + h * k3)
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _extremal_factory(cp: ConstraintProfile, kind: str):
    """Scalar extremal-acceleration evaluator (pointwise rows)."""
    sign_neg = kind == "alpha"

    def accel(s, z):
        a, b, c = cp.accel_rows(s)
        mask = a < 0.0 if sign_neg else a > 0.0
        if not np.any(mask):
            label = "alpha" if sign_neg else "beta"
            raise ValueError(f"{label} undefined (zero-inertia): no usable row at s={s!r}")
        vals = (-b[mask] * max(z, 0.0) - c[mask]) / a[mask]
        return float(np.max(vals)) if sign_neg else float(np.min(vals))

    return accel


def _integrate(
    cp: ConstraintProfile,
    limits: LimitCurves,
    start: PhasePoint,
    kind: str,
    *,
    step: float | None = None,
    s_stop: float | None = None,
    anchor: PhasePoint | None = None,
) -> PhaseProfile:
    forward = kind == "beta"
    s_end = cp.s_end
    if not (0.0 <= start.s <= s_end):
        raise ValueError(f"start s={start.s!r} outside [0, {s_end!r}]")
    if start.sdot < 0.0:
        raise ValueError("start sdot must be nonnegative")

    z0 = start.z
    zlim0 = limits.limit_sq_at(start.s)
    if np.isfinite(zlim0):
        if z0 > zlim0 * (1.0 + 1e-3) + 1e-9:
            raise ValueError(
                f"start outside admissible region: sdot={start.sdot!r} above limit at s={start.s!r}"
            )
        z0 = min(z0, zlim0 * (1.0 - 1e-9))

    goal = s_end if forward else 0.0
    if s_stop is not None:
        goal = min(s_stop, s_end) if forward else max(s_stop, 0.0)
    span = (goal - start.s) if forward else (start.s - goal)
    boundary = Termination.HIT_SE if forward else Termination.HIT_S0

    h_max = step if step is not None else s_end / DEFAULT_STEP_COUNT
    if span <= 1e-15 * max(1.0, s_end):
        s_arr = np.array([start.s])
        z_arr = np.array([z0])
        return _package(kind, forward, s_arr, z_arr, boundary, anchor)

    n = max(1, int(math.ceil(span / h_max)))
    h = (span / n) * (1.0 if forward else -1.0)

    accel = _extremal_factory(cp, kind)

    # Stage abscissas precomputed so the hot loop reuses vectorized rows.
    stage_s = start.s + 0.5 * h * np.arange(2 * n + 1)
    stage_s[-1] = goal
    a_st, b_st, c_st = cp.accel_rows(stage_s)
    neg_any = np.any(a_st < 0.0, axis=0)
    pos_any = np.any(a_st > 0.0, axis=0)
    usable = neg_any if kind == "alpha" else pos_any
    if not np.all(usable):
        bad_s = stage_s[~usable][0]
        raise ValueError(f"{kind} undefined (zero-inertia): no usable row at s={bad_s!r}")

    sel = (a_st < 0.0) if kind == "alpha" else (a_st > 0.0)

    def f_stage(idx, z):
        a = a_st[:, idx]
        b = b_st[:, idx]
        c = c_st[:, idx]
        m = sel[:, idx]
        vals = (-b[m] * max(z, 0.0) - c[m]) / a[m]
        acc = vals.max() if kind == "alpha" else vals.min()
        return 2.0 * acc

    def f_scalar(s, z):
        return 2.0 * accel(s, z)

    s_samples = [start.s]
    z_samples = [z0]
    termination = boundary

    s_cur = start.s
    z_cur = z0
    for k in range(n):
        base = 2 * k
        k1 = f_stage(base, z_cur)
        k2 = f_stage(base + 1, z_cur + 0.5 * h * k1)
        k3 = f_stage(base + 1, z_cur + 0.5 * h * k2)
        k4 = f_stage(base + 2, z_cur + h * k3)
        z_new = z_cur + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        s_new = goal if k == n - 1 else s_cur + h

        zlim_new = limits.limit_sq_at(s_new)
        crossed = np.isfinite(zlim_new) and (z_new - zlim_new) > 1e-9 * max(1.0, zlim_new)
        went_neg = z_new < 0.0

        if crossed or went_neg:
            tau_cross = np.inf
            tau_zero = np.inf
            if crossed:
                tau_cross = _refine_crossing(f_scalar, limits, s_cur, z_cur, h, s_end)
            if went_neg:
                tau_zero = z_cur / (z_cur - z_new) if z_new < z_cur else 1.0
            if tau_cross <= tau_zero:
                s_hit = s_cur + tau_cross * h
                z_hit = limits.limit_sq_at(s_hit)
                s_samples.append(s_hit)
                z_samples.append(z_hit)
                termination = Termination.HIT_LIMIT
            else:
                s_hit = s_cur + tau_zero * h
                s_samples.append(s_hit)
                z_samples.append(0.0)
                termination = Termination.HIT_SDOT_ZERO
            break

        s_samples.append(s_new)
        z_samples.append(z_new)
        s_cur, z_cur = s_new, z_new

    s_arr = np.asarray(s_samples)
    z_arr = np.maximum(np.asarray(z_samples), 0.0)
    return _package(kind, forward, s_arr, z_arr, termination, anchor)


def _refine_crossing(f_scalar, limits, s_cur, z_cur, h, s_end):
    """Bisect the step fraction where the RK4 solution meets the limit."""

    def viol(tau):
        if tau <= 0.0:
            z = z_cur
            s = s_cur
        else:
            s = s_cur + tau * h
            z = _rk4(f_scalar, s_cur, z_cur, tau * h)
        return z - limits.limit_sq_at(s)

    lo, hi = 0.0, 1.0
    v_lo = viol(0.0)
    if v_lo > 0.0:
        return 0.0
    tol = 1e-10 * s_end / abs(h)
    while (hi - lo) > max(tol, 1e-15):
        mid = 0.5 * (lo + hi)
        if viol(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _package(kind, forward, s_arr, z_arr, termination, anchor):
    if not forward:
        s_arr = s_arr[::-1].copy()
        z_arr = z_arr[::-1].copy()
    if anchor is not None:
        if forward and anchor.s < s_arr[0]:
            s_arr = np.concatenate([[anchor.s], s_arr])
            z_arr = np.concatenate([[anchor.z], z_arr])
        elif not forward and anchor.s > s_arr[-1]:
            s_arr = np.concatenate([s_arr, [anchor.s]])
            z_arr = np.concatenate([z_arr, [anchor.z]])
    return PhaseProfile(
        kind=kind,
        direction="forward" if forward else "backward",
        s=s_arr,
        z=z_arr,
        termination=termination,
    )


def integrate_beta(
    cp: ConstraintProfile,
    limits: LimitCurves,
    start: PhasePoint,
    *,
    step: float | None = None,
    s_stop: float | None = None,
    anchor: PhasePoint | None = None,
) -> PhaseProfile:
    """Integrate forward with maximum acceleration from ``start``."""
    return _integrate(cp, limits, start, "beta", step=step, s_stop=s_stop, anchor=anchor)


def integrate_alpha(
    cp: ConstraintProfile,
    limits: LimitCurves,
    start: PhasePoint,
    *,
    step: float | None = None,
    s_stop: float | None = None,
    anchor: PhasePoint | None = None,
) -> PhaseProfile:
    """Integrate backward with minimum acceleration from ``start``."""
    return _integrate(cp, limits, start, "alpha", step=step, s_stop=s_stop, anchor=anchor)


def intersect_profiles(a: PhaseProfile, b: PhaseProfile) -> PhasePoint | None:
    """Earliest-s meeting point of two profiles, or None.

    The squared-velocity gap is evaluated on the union of both sample
    grids over the overlapping s range; the first sign change is located
    by linear interpolation. If the profiles merely touch within
    tolerance over several cells, the smallest touching s wins.
    """
    lo = max(a.s_lo, b.s_lo)
    hi = min(a.s_hi, b.s_hi)
    if hi < lo:
        return None
    grid = np.union1d(a.s, b.s)
    grid = grid[(grid >= lo) & (grid <= hi)]
    if len(grid) == 0 or grid[0] > lo:
        grid = np.concatenate([[lo], grid])
    if grid[-1] < hi:
        grid = np.concatenate([grid, [hi]])
    za = a.z_at(grid)
    zb = b.z_at(grid)
    d = za - zb
    scale = max(1.0, float(np.max(np.abs(za))), float(np.max(np.abs(zb))))
    eps = 1e-12 * scale

    touching = np.abs(d) <= eps
    for i in range(len(grid) - 1):
        if touching[i]:
            return PhasePoint(float(grid[i]), math.sqrt(max(za[i], 0.0)))
        if d[i] * d[i + 1] < 0.0:
            t = d[i] / (d[i] - d[i + 1])
            s_c = grid[i] + t * (grid[i + 1] - grid[i])
            z_c = za[i] + t * (za[i + 1] - za[i])
            return PhasePoint(float(s_c), math.sqrt(max(z_c, 0.0)))
    if touching[-1]:
        return PhasePoint(float(grid[-1]), math.sqrt(max(za[-1], 0.0)))
    return None
