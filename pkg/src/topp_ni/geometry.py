"""Planar path geometry: cubic Bezier curves reparameterized by arc length.

Planner code consumes a path only through :class:`PathSpec`: total arc
length plus signed curvature and its arc-length derivative. For Bezier
paths the arc-length map is tabulated with fixed-order Gauss-Legendre
quadrature per table cell; the inverse map uses monotone cubic
interpolation as an initial guess followed by Newton steps against the
exact quadrature, so lookups in ``s`` stay accurate well below the table
resolution.

Everything here is immutable after construction and reentrant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "BezierPath",
    "PathSpec",
    "bezier_build",
    "to_path_spec",
    "line_path",
    "circle_path",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)


def _shape_like(values, ref):
    """Return a float for scalar ``ref`` input, an ndarray otherwise."""
    arr = np.asarray(values, dtype=float)
    if np.ndim(ref) == 0:
        return float(arr)
    return arr


@dataclass(frozen=True)
class PathSpec:
    """Arc-length view of a planar path.

    ``curvature`` and ``curvature_rate`` accept a scalar or 1-D array of
    path coordinates in ``[0, s_end]`` and return a matching shape.
    ``position`` is optional and only used by diagnostics and tests.
    """

    s_end: float
    curvature: Callable
    curvature_rate: Callable
    position: Callable | None = None
    label: str = "path"


class BezierPath:
    """Cubic Bezier curve with a tabulated arc-length parameterization.

    The table maps the curve parameter ``lam`` in [0, 1] to arc length
    ``s`` in [0, s_end]; both columns are strictly increasing.
    """

    def __init__(self, control_points, lam_table, s_table):
        self.control_points = np.asarray(control_points, dtype=float)
        self.lam_table = np.asarray(lam_table, dtype=float)
        self.s_table = np.asarray(s_table, dtype=float)
        p = self.control_points
        d1 = 3.0 * (p[1:] - p[:-1])
        self._d1 = d1
        self._d2 = 6.0 * np.stack([p[0] - 2.0 * p[1] + p[2], p[1] - 2.0 * p[2] + p[3]])
        self._d3 = 6.0 * (p[3] - 3.0 * p[2] + 3.0 * p[1] - p[0])
        # Horner coefficients of B' (quadratic) and B'' (linear) in lam
        self._v0 = d1[0]
        self._v1 = 2.0 * (d1[1] - d1[0])
        self._v2 = d1[0] - 2.0 * d1[1] + d1[2]
        self._a0 = self._d2[0]
        self._a1 = self._d2[1] - self._d2[0]

    @property
    def s_end(self) -> float:
        return float(self.s_table[-1])

    def point(self, lam):
        lam = np.asarray(lam, dtype=float)
        u = 1.0 - lam
        basis = np.stack([u ** 3, 3.0 * u * u * lam, 3.0 * u * lam * lam, lam ** 3])
        return np.einsum("i...,ik->...k", basis, self.control_points)

    def velocity(self, lam):
        lam = np.asarray(lam, dtype=float)[..., None]
        return self._v0 + lam * (self._v1 + lam * self._v2)

    def acceleration(self, lam):
        lam = np.asarray(lam, dtype=float)[..., None]
        return self._a0 + lam * self._a1

    def speed(self, lam):
        v = self.velocity(lam)
        return np.sqrt(v[..., 0] ** 2 + v[..., 1] ** 2)

    def _arc_many(self, lam_arr):
        idx = np.clip(
            np.searchsorted(self.lam_table, lam_arr, side="right") - 1,
            0,
            len(self.lam_table) - 2,
        )
        a = self.lam_table[idx]
        half = 0.5 * (lam_arr - a)
        nodes = a[..., None] + half[..., None] * (_GL_NODES + 1.0)
        seg = half * np.sum(_GL_WEIGHTS * self.speed(nodes), axis=-1)
        return self.s_table[idx] + seg

    def _arc_one(self, lam: float) -> float:
        k = min(max(int(np.searchsorted(self.lam_table, lam, side="right")) - 1, 0),
                len(self.lam_table) - 2)
        a = self.lam_table[k]
        half = 0.5 * (lam - a)
        nodes = a + half * (_GL_NODES + 1.0)
        return float(self.s_table[k] + half * (_GL_WEIGHTS @ self.speed(nodes)))

    def arc_length(self, lam):
        """Arc length from the curve start to parameter ``lam``."""
        if np.ndim(lam) == 0:
            return self._arc_one(float(lam))
        return self._arc_many(np.asarray(lam, dtype=float))

    def lam_at_s(self, s):
        """Invert the arc-length map; exact to roundoff, not table error."""
        if np.ndim(s) == 0:
            s_q = min(max(float(s), 0.0), self.s_end)
            lam = float(np.interp(s_q, self.s_table, self.lam_table))
            for _ in range(3):
                residual = self._arc_one(lam) - s_q
                v = max(float(self.speed(lam)), 1e-12)
                lam = min(max(lam - residual / v, 0.0), 1.0)
            return lam
        s_arr = np.asarray(s, dtype=float)
        s_q = np.clip(s_arr, 0.0, self.s_end)
        lam = np.interp(s_q, self.s_table, self.lam_table)
        for _ in range(3):
            residual = self._arc_many(lam) - s_q
            lam = np.clip(lam - residual / np.maximum(self.speed(lam), 1e-12), 0.0, 1.0)
        return lam

    def curvature_at_lam(self, lam):
        v = self.velocity(lam)
        a = self.acceleration(lam)
        cross = v[..., 0] * a[..., 1] - v[..., 1] * a[..., 0]
        d = v[..., 0] ** 2 + v[..., 1] ** 2
        return cross / np.maximum(d, 1e-300) ** 1.5

    def curvature_rate_at_lam(self, lam):
        """Derivative of signed curvature with respect to arc length."""
        v = self.velocity(lam)
        a = self.acceleration(lam)
        j = self._d3
        cross = v[..., 0] * a[..., 1] - v[..., 1] * a[..., 0]
        b = v[..., 0] * j[1] - v[..., 1] * j[0]
        c = v[..., 0] * a[..., 0] + v[..., 1] * a[..., 1]
        d = v[..., 0] ** 2 + v[..., 1] ** 2
        return (b * d - 3.0 * cross * c) / np.maximum(d, 1e-300) ** 3


def bezier_build(control_points, samples: int = 200) -> BezierPath:
    """Build a cubic Bezier path and its arc-length table.

    ``samples`` is the number of table cells; arc length per cell comes
    from order-5 Gauss-Legendre quadrature of the parametric speed.
    """
    pts = np.asarray(control_points, dtype=float)
    if pts.shape != (4, 2):
        raise ValueError("expected 4 planar control points")
    if not np.all(np.isfinite(pts)):
        raise ValueError("control points must be finite")
    if int(samples) < 2:
        raise ValueError("samples must be >= 2")

    lam_table = np.linspace(0.0, 1.0, int(samples) + 1)
    d1 = 3.0 * (pts[1:] - pts[:-1])
    a = lam_table[:-1]
    half = 0.5 * (lam_table[1:] - a)
    nodes = a[:, None] + half[:, None] * (_GL_NODES + 1.0)
    u = 1.0 - nodes
    basis = np.stack([u * u, 2.0 * u * nodes, nodes * nodes])
    vel = np.einsum("ikn,ij->knj", basis, d1)
    cells = half * np.sum(_GL_WEIGHTS * np.linalg.norm(vel, axis=-1), axis=1)
    s_table = np.concatenate([[0.0], np.cumsum(cells)])

    scale = float(np.max(np.abs(pts - pts[0])))
    if scale == 0.0 or s_table[-1] <= 1e-12 * max(1.0, scale):
        raise ValueError("zero-length path")
    if np.any(np.diff(s_table) <= 0.0):
        raise ValueError("degenerate path: arc-length table is not strictly increasing")
    return BezierPath(pts, lam_table, s_table)


def to_path_spec(path: BezierPath) -> PathSpec:
    """Expose a Bezier path through the arc-length interface."""
    memo: dict = {}  # one-entry scalar memo; callers query kappa and its rate at the same s

    def lam_of(s):
        if np.ndim(s) == 0:
            key = float(s)
            if memo.get("s") != key:
                memo["s"] = key
                memo["lam"] = path.lam_at_s(key)
            return memo["lam"]
        return path.lam_at_s(s)

    def curvature(s):
        lam = np.asarray(lam_of(s))
        return _shape_like(path.curvature_at_lam(lam), s)

    def curvature_rate(s):
        lam = np.asarray(lam_of(s))
        return _shape_like(path.curvature_rate_at_lam(lam), s)

    def position(s):
        return path.point(np.asarray(lam_of(s)))

    return PathSpec(
        s_end=path.s_end,
        curvature=curvature,
        curvature_rate=curvature_rate,
        position=position,
        label="bezier",
    )


def line_path(length: float, label: str = "line") -> PathSpec:
    """Straight segment of the given length along the x axis."""
    if not np.isfinite(length) or length <= 0.0:
        raise ValueError("length must be positive")
    length = float(length)

    def zero(s):
        return _shape_like(np.zeros_like(np.asarray(s, dtype=float)), s)

    def position(s):
        s = np.asarray(s, dtype=float)
        return np.stack([s, np.zeros_like(s)], axis=-1)

    return PathSpec(length, zero, zero, position, label)


def circle_path(radius: float, length: float | None = None, label: str = "circle") -> PathSpec:
    """Circular arc of constant signed curvature ``1/radius``."""
    if not np.isfinite(radius) or radius <= 0.0:
        raise ValueError("radius must be positive")
    radius = float(radius)
    length = 2.0 * np.pi * radius if length is None else float(length)
    if not np.isfinite(length) or length <= 0.0:
        raise ValueError("length must be positive")
    kappa = 1.0 / radius

    def curvature(s):
        return _shape_like(np.full_like(np.asarray(s, dtype=float), kappa), s)

    def curvature_rate(s):
        return _shape_like(np.zeros_like(np.asarray(s, dtype=float)), s)

    def position(s):
        theta = np.asarray(s, dtype=float) / radius
        return np.stack([radius * np.sin(theta), radius * (1.0 - np.cos(theta))], axis=-1)

    return PathSpec(length, curvature, curvature_rate, position, label)
