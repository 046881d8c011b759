"""Phase-plane limit curves.

Three curves bound the admissible region above the path axis:

* ``mvc``      -- the velocity above which the acceleration rows conflict
                  (some lower bound exceeds some upper bound). Computed in
                  closed form per row pair; +inf where no pair conflicts.
* ``vlim``     -- the cap implied by the velocity rows; +inf if none bind.
* ``mvc_star`` -- the pointwise minimum of the two, the curve the planner
                  actually integrates against.

``dagger_segments`` lists the maximal s-intervals where the velocity cap
is strictly the binding curve (``vlim < mvc``); switch-point handling is
qualitatively different there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constraints import (
    ConstraintProfile,
    alpha_from_rows,
    beta_from_rows,
    velocity_limit,
    velocity_limit_on_grid,
)

__all__ = ["LimitCurves", "compute_limit_curves", "mvc_at"]

_A_ZERO_REL = 1e-12


def mvc_squared_from_rows(A, B, C):
    """Squared conflict velocity per grid column, +inf where unbounded.

    Returns ``(z, bad)`` where ``bad`` marks columns whose rows already
    conflict at rest (the path cannot be traversed there at all).

    For a pair (i with A_i > 0, j with A_j < 0) the upper bound from row i
    meets the lower bound from row j at ``z = Q/P`` with
    ``P = A_i B_j - A_j B_i`` and ``Q = A_j C_i - A_i C_j``; the pair
    conflicts for growing z only when ``P > 0``. ``Q <= 0`` means conflict
    at z = 0. Rows with A == 0 contribute the direct cap ``-C/B``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    m, k = A.shape
    tol0 = _A_ZERO_REL * np.maximum(1.0, np.max(np.abs(A), axis=0))
    pos = A > tol0
    neg = A < -tol0
    zero = ~pos & ~neg

    z_best = np.full(k, np.inf)
    bad = np.zeros(k, dtype=bool)

    for i in range(m):
        for j in range(m):
            valid = pos[i] & neg[j]
            if not np.any(valid):
                continue
            p = A[i] * B[j] - A[j] * B[i]
            q = A[j] * C[i] - A[i] * C[j]
            bad |= valid & (q <= 0.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                cand = np.where(valid & (p > 0.0) & (q > 0.0), q / np.where(p > 0.0, p, 1.0), np.inf)
            z_best = np.minimum(z_best, cand)

    for i in range(m):
        zr = zero[i]
        if not np.any(zr):
            continue
        b_pos = B[i] > 0.0
        bad |= zr & b_pos & (C[i] >= 0.0)
        bad |= zr & ~b_pos & (C[i] > 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            cap = np.where(zr & b_pos & (C[i] < 0.0), -C[i] / np.where(b_pos, B[i], 1.0), np.inf)
        z_best = np.minimum(z_best, cap)

    return z_best, bad


def mvc_at(cp: ConstraintProfile, s: float) -> float:
    """Closed-form acceleration-implied limit at a single point."""
    a, b, c = cp.accel_rows(float(s))
    z, bad = mvc_squared_from_rows(a[:, None], b[:, None], c[:, None])
    if bad[0]:
        raise ValueError(f"maximum velocity curve vanishes at s={float(s)!r}")
    return float(np.sqrt(z[0]))


@dataclass
class LimitCurves:
    """Sampled limit curves plus closed-form point evaluators."""

    grid: np.ndarray
    mvc: np.ndarray
    vlim: np.ndarray
    mvc_star: np.ndarray
    dagger_segments: list
    cp: ConstraintProfile = field(repr=False)
    eps_v: float = 0.0
    _zstar: np.ndarray = field(default=None, repr=False)
    _switch_cache: list = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self._zstar = np.square(self.mvc_star)

    @property
    def s_end(self) -> float:
        return float(self.grid[-1])

    @property
    def grid_h(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def velocity_scale(self) -> float:
        finite = self.mvc_star[np.isfinite(self.mvc_star)]
        return float(np.max(finite)) if finite.size else 1.0

    def mvc_at(self, s: float) -> float:
        return mvc_at(self.cp, s)

    def vlim_at(self, s: float) -> float:
        return velocity_limit(self.cp, float(s))

    def mvc_star_at(self, s: float) -> float:
        return min(self.mvc_at(s), self.vlim_at(s))

    def limit_sq_at(self, s: float) -> float:
        """Interpolated ``mvc_star**2``; a cell adjoining an unbounded node
        uses the bounded node's value."""
        g = self.grid
        k = int(np.clip(np.searchsorted(g, s), 1, len(g) - 1))
        z0, z1 = self._zstar[k - 1], self._zstar[k]
        if np.isinf(z0) and np.isinf(z1):
            return np.inf
        if np.isinf(z0):
            return float(z1)
        if np.isinf(z1):
            return float(z0)
        t = (float(s) - g[k - 1]) / (g[k] - g[k - 1])
        return float(z0 + t * (z1 - z0))

    def limit_at(self, s: float) -> float:
        return float(np.sqrt(self.limit_sq_at(s)))

    def slope_mvc_at(self, s: float) -> float:
        """Central-difference slope of the acceleration-implied curve."""
        h = self.grid_h
        lo = max(0.0, float(s) - h)
        hi = min(self.s_end, float(s) + h)
        return (self.mvc_at(hi) - self.mvc_at(lo)) / (hi - lo)

    def slope_star_at(self, s: float) -> float:
        h = self.grid_h
        lo = max(0.0, float(s) - h)
        hi = min(self.s_end, float(s) + h)
        return (self.mvc_star_at(hi) - self.mvc_star_at(lo)) / (hi - lo)

    def is_dagger(self, s: float) -> bool:
        return any(lo <= s <= hi for lo, hi in self.dagger_segments)

    def alpha_on_grid(self, z_values) -> np.ndarray:
        a, b, c = self.cp.accel_rows(self.grid)
        return alpha_from_rows(a, b, c, np.asarray(z_values, dtype=float))

    def beta_on_grid(self, z_values) -> np.ndarray:
        a, b, c = self.cp.accel_rows(self.grid)
        return beta_from_rows(a, b, c, np.asarray(z_values, dtype=float))


def _bisect_sign_change(f, lo: float, hi: float, f_lo: float, iters: int = 60) -> float:
    """Bisect ``f`` for a sign change on [lo, hi]; tolerates infinities."""
    a, b = lo, hi
    sa = np.sign(f_lo)
    for _ in range(iters):
        mid = 0.5 * (a + b)
        fm = f(mid)
        if np.sign(fm) == sa:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def compute_limit_curves(cp: ConstraintProfile, grid_n: int = 2000) -> LimitCurves:
    """Sample all limit curves on a uniform grid and extract the velocity-
    bound segments.

    Raises when some grid point cannot be traversed even at rest (the
    acceleration rows conflict at sdot = 0) or a velocity row is
    infeasible.
    """
    if int(grid_n) < 16:
        raise ValueError("grid_n must be >= 16")
    grid = np.linspace(0.0, cp.s_end, int(grid_n))
    a, b, c = cp.accel_rows(grid)
    z_mvc, bad = mvc_squared_from_rows(a, b, c)
    if np.any(bad):
        raise ValueError(
            f"maximum velocity curve vanishes (path untraversable at rest) at s={grid[bad][0]!r}"
        )
    mvc = np.sqrt(z_mvc)
    vlim = velocity_limit_on_grid(cp, grid)
    mvc_star = np.minimum(mvc, vlim)

    finite = mvc_star[np.isfinite(mvc_star)]
    scale = float(np.max(finite)) if finite.size else 1.0
    eps_v = 1e-9 * scale

    inside = vlim < (mvc - eps_v)
    segments = []
    k = 0
    n = len(grid)
    while k < n:
        if not inside[k]:
            k += 1
            continue
        k1 = k
        while k1 + 1 < n and inside[k1 + 1]:
            k1 += 1
        lo = grid[k]
        hi = grid[k1]

        def gap(s):
            return mvc_at(cp, s) - velocity_limit(cp, s) - eps_v

        if k > 0:
            lo = _bisect_sign_change(gap, grid[k - 1], grid[k], gap(grid[k - 1]))
        if k1 + 1 < n:
            hi = _bisect_sign_change(gap, grid[k1], grid[k1 + 1], gap(grid[k1]))
        segments.append((float(lo), float(hi)))
        k = k1 + 1

    return LimitCurves(grid, mvc, vlim, mvc_star, segments, cp, eps_v)
