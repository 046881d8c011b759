"""Constraint rows along a path and the extremal accelerations they imply.

Every constraint source is reduced to row data evaluated along the path:

    acceleration rows:  A_i(s) * sddot + B_i(s) * sdot^2 + C_i(s) <= 0
    velocity rows:      A_i(s) * sdot  + D_i(s)          <= 0

Given the rows, the feasible path acceleration at a phase point lies in
``[alpha(s, sdot), beta(s, sdot)]``: rows with negative A bound it from
below, rows with positive A from above. Rows with A == 0 carry no
acceleration freedom and act as direct velocity caps; they are handled by
the limit-curve machinery, not here.

ConstraintProfile instances are immutable and all evaluations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .geometry import PathSpec

__all__ = [
    "ConstraintProfile",
    "GeneralizedDynamics",
    "alpha",
    "beta",
    "velocity_limit",
    "from_generalized_dynamics",
    "unicycle_constraints",
    "tabulated_constraints",
]


@dataclass(frozen=True)
class ConstraintProfile:
    """Row data for one planning instance.

    ``accel_rows(s)`` returns arrays ``(A, B, C)`` of shape ``(m,)`` for a
    scalar ``s`` or ``(m, len(s))`` for an array. ``vel_rows`` behaves the
    same with ``(A, D)`` or is absent when the instance carries no
    velocity rows.
    """

    s_end: float
    m: int
    m_vel: int
    _accel: Callable = field(repr=False)
    _vel: Callable | None = field(repr=False, default=None)
    label: str = "constraints"

    def accel_rows(self, s):
        return self._accel(s)

    def vel_rows(self, s):
        if self._vel is None:
            raise ValueError("constraint profile has no velocity rows")
        return self._vel(s)

    @property
    def has_velocity_rows(self) -> bool:
        return self._vel is not None

    def without_velocity(self) -> "ConstraintProfile":
        """Copy of this profile with the velocity rows dropped."""
        return replace(self, _vel=None, m_vel=0)


@dataclass(frozen=True)
class GeneralizedDynamics:
    """Second-order inequality model reduced onto a path.

    The model is ``M(xi) xi_dd + xi_d^T P(xi) xi_d + Q(xi) <= 0`` with an
    n-dimensional state following the path as ``xi = xi(s)``. Shapes:
    ``M: (m, n)``, ``P: (n, m, n)``, ``Q: (m,)``.
    """

    n: int
    m: int
    xi: Callable
    xi_s: Callable
    xi_ss: Callable
    M: Callable
    P: Callable
    Q: Callable
    s_end: float = 1.0


def _rows_at(fn, s):
    """Evaluate a scalar-s row function for scalar or array input."""
    s_arr = np.asarray(s, dtype=float)
    if s_arr.ndim == 0:
        return fn(float(s_arr))
    cols = [fn(float(v)) for v in s_arr]
    return tuple(np.stack(part, axis=-1) for part in zip(*cols))


def from_generalized_dynamics(dyn: GeneralizedDynamics) -> ConstraintProfile:
    """Reduce generalized dynamics to acceleration rows along the path.

    Rowwise: ``A = M xi_s``, ``B = M xi_ss + xi_s^T P xi_s``, ``C = Q``.
    """
    xi0 = np.asarray(dyn.xi(0.0), dtype=float)
    m0 = np.asarray(dyn.M(xi0), dtype=float)
    p0 = np.asarray(dyn.P(xi0), dtype=float)
    q0 = np.asarray(dyn.Q(xi0), dtype=float)
    if xi0.shape != (dyn.n,) or m0.shape != (dyn.m, dyn.n):
        raise ValueError("dimension mismatch in state or inertia map")
    if p0.shape != (dyn.n, dyn.m, dyn.n) or q0.shape != (dyn.m,):
        raise ValueError("dimension mismatch in quadratic tensor or bias")

    def rows(s: float):
        xi = np.asarray(dyn.xi(s), dtype=float)
        xs = np.asarray(dyn.xi_s(s), dtype=float)
        xss = np.asarray(dyn.xi_ss(s), dtype=float)
        mm = np.asarray(dyn.M(xi), dtype=float)
        pp = np.asarray(dyn.P(xi), dtype=float)
        qq = np.asarray(dyn.Q(xi), dtype=float)
        a = mm @ xs
        b = mm @ xss + np.einsum("i,imj,j->m", xs, pp, xs)
        return a, b, qq

    return ConstraintProfile(
        s_end=float(dyn.s_end),
        m=dyn.m,
        m_vel=0,
        _accel=lambda s: _rows_at(rows, s),
        label="generalized",
    )


def unicycle_constraints(path: PathSpec, v_max, a_max) -> ConstraintProfile:
    """Rows for a vehicle whose heading is tangent to the path.

    The wheel commands are angular velocity ``w = kappa(s) * sdot`` and
    forward velocity ``v = sdot``; bounding ``(w, v)`` by ``v_max`` and
    their time derivatives by ``a_max`` (componentwise, symmetric) gives
    four acceleration rows and four velocity rows in mirrored pairs.
    """
    v_max = np.asarray(v_max, dtype=float)
    a_max = np.asarray(a_max, dtype=float)
    if v_max.shape != (2,) or a_max.shape != (2,):
        raise ValueError("v_max and a_max must be 2-vectors")
    if np.any(v_max <= 0.0) or np.any(a_max <= 0.0):
        raise ValueError("velocity and acceleration bounds must be strictly positive")
    v_w, v_v = float(v_max[0]), float(v_max[1])
    a_w, a_v = float(a_max[0]), float(a_max[1])

    def accel(s):
        kap = np.asarray(path.curvature(s), dtype=float)
        rate = np.asarray(path.curvature_rate(s), dtype=float)
        one = np.ones_like(kap)
        zero = np.zeros_like(kap)
        a = np.stack([kap, one, -kap, -one])
        b = np.stack([rate, zero, -rate, zero])
        c = np.stack([-a_w * one, -a_v * one, -a_w * one, -a_v * one])
        return a, b, c

    def vel(s):
        kap = np.asarray(path.curvature(s), dtype=float)
        one = np.ones_like(kap)
        a = np.stack([kap, one, -kap, -one])
        d = np.stack([-v_w * one, -v_v * one, -v_w * one, -v_v * one])
        return a, d

    return ConstraintProfile(
        s_end=path.s_end, m=4, m_vel=4, _accel=accel, _vel=vel, label="unicycle"
    )


def tabulated_constraints(
    s_grid, A, B, C, A_vel=None, D=None, label: str = "tabulated"
) -> ConstraintProfile:
    """Rows sampled on an s grid, evaluated elsewhere by linear interpolation."""
    s_grid = np.asarray(s_grid, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if s_grid.ndim != 1 or len(s_grid) < 2 or np.any(np.diff(s_grid) <= 0):
        raise ValueError("s_grid must be strictly increasing with at least 2 samples")
    if not (A.shape == B.shape == C.shape) or A.shape[1] != len(s_grid):
        raise ValueError("row tables must share the shape (m, len(s_grid))")

    def interp_table(table):
        def rows(s):
            s_arr = np.asarray(s, dtype=float)
            out = np.stack([np.interp(s_arr, s_grid, row) for row in table])
            return out

        return rows

    accel_a, accel_b, accel_c = interp_table(A), interp_table(B), interp_table(C)

    def accel(s):
        return accel_a(s), accel_b(s), accel_c(s)

    vel_fn = None
    m_vel = 0
    if A_vel is not None or D is not None:
        A_vel = np.atleast_2d(np.asarray(A_vel, dtype=float))
        D = np.atleast_2d(np.asarray(D, dtype=float))
        if A_vel.shape != D.shape or A_vel.shape[1] != len(s_grid):
            raise ValueError("velocity row tables must share the shape (m_vel, len(s_grid))")
        vel_a, vel_d = interp_table(A_vel), interp_table(D)
        m_vel = A_vel.shape[0]

        def vel(s):
            return vel_a(s), vel_d(s)

        vel_fn = vel

    return ConstraintProfile(
        s_end=float(s_grid[-1]),
        m=A.shape[0],
        m_vel=m_vel,
        _accel=accel,
        _vel=vel_fn,
        label=label,
    )


def alpha_from_rows(A, B, C, z):
    """Lower acceleration extreme from rows; -inf where no row has A < 0."""
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        vals = (-B * z - C) / A
    return np.max(np.where(A < 0.0, vals, -np.inf), axis=0)


def beta_from_rows(A, B, C, z):
    """Upper acceleration extreme from rows; +inf where no row has A > 0."""
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        vals = (-B * z - C) / A
    return np.min(np.where(A > 0.0, vals, np.inf), axis=0)


def alpha(cp: ConstraintProfile, s: float, sdot: float) -> float:
    """Minimum feasible path acceleration at ``(s, sdot)``."""
    a, b, c = cp.accel_rows(s)
    neg = a < 0.0
    if not np.any(neg):
        raise ValueError(f"alpha undefined (zero-inertia): no row with A_i < 0 at s={s!r}")
    z = float(sdot) * float(sdot)
    return float(np.max((-b[neg] * z - c[neg]) / a[neg]))


def beta(cp: ConstraintProfile, s: float, sdot: float) -> float:
    """Maximum feasible path acceleration at ``(s, sdot)``."""
    a, b, c = cp.accel_rows(s)
    pos = a > 0.0
    if not np.any(pos):
        raise ValueError(f"beta undefined (zero-inertia): no row with A_i > 0 at s={s!r}")
    z = float(sdot) * float(sdot)
    return float(np.min((-b[pos] * z - c[pos]) / a[pos]))


_VEL_TOL = 1e-12


def velocity_limit(cp: ConstraintProfile, s: float) -> float:
    """Largest sdot >= 0 satisfying every velocity row; +inf if none bind."""
    if not cp.has_velocity_rows:
        return np.inf
    a, d = cp.vel_rows(s)
    scale = max(1.0, float(np.max(np.abs(d))))
    if np.any((a <= _VEL_TOL) & (d > _VEL_TOL * scale)):
        raise ValueError(f"velocity-infeasible path point at s={s!r}")
    pos = a > _VEL_TOL
    if not np.any(pos):
        return np.inf
    cap = float(np.min(-d[pos] / a[pos]))
    if cap < 0.0:
        raise ValueError(f"velocity-infeasible path point at s={s!r}")
    return cap


def velocity_limit_on_grid(cp: ConstraintProfile, s_values) -> np.ndarray:
    """Vectorized velocity limit over an s grid."""
    s_values = np.asarray(s_values, dtype=float)
    if not cp.has_velocity_rows:
        return np.full(s_values.shape, np.inf)
    a, d = cp.vel_rows(s_values)
    scale = max(1.0, float(np.max(np.abs(d))))
    bad = (a <= _VEL_TOL) & (d > _VEL_TOL * scale)
    if np.any(bad):
        where = s_values[np.any(bad, axis=0)][0]
        raise ValueError(f"velocity-infeasible path point at s={where!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        caps = np.where(a > _VEL_TOL, -d / np.where(a > _VEL_TOL, a, 1.0), np.inf)
    out = np.min(caps, axis=0)
    if np.any(out < 0.0):
        where = s_values[out < 0.0][0]
        raise ValueError(f"velocity-infeasible path point at s={where!r}")
    return out
