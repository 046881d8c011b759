"""Planner: extremal-profile chaining, failure diagnosis, and the
sufficient failure-condition check.

``ni_plan`` builds the time-optimal trajectory by alternating maximal
acceleration and deceleration profiles: integrate forward until the limit
curve is hit, search forward along the curve for the next switch point,
integrate a deceleration backward from it until it meets the accumulated
chain, and repeat; a final deceleration from the terminal state closes
the chain. When a backward profile meets the chain at several points the
earliest-s meeting wins, which can supersede previously recorded
acceleration-to-deceleration transitions (those events are logged).

``rt_detect`` runs the same machinery but tolerates disconnections: it
tracks the longest continuous prefix and its coverage ``s_last``, and
declares failure exactly when the prefix cannot reach the path end.

``check_property6`` evaluates a sufficient condition for that failure
without running the planner against the velocity cap: (C1) the fused
limit dips below the acceleration-only optimum somewhere, and (C2) the
velocity-bound stretches contain no discontinuity or zero-inertia switch
candidates that could re-anchor the chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constraints import ConstraintProfile
from .limits import LimitCurves, compute_limit_curves
from .profiles import (
    PhasePoint,
    PhaseProfile,
    Termination,
    integrate_alpha,
    integrate_beta,
    intersect_profiles,
)
from .switchpoints import SwitchPoint, find_next_switch

__all__ = [
    "Trajectory",
    "RtReport",
    "BreakRecord",
    "Property6Report",
    "UntraversableError",
    "NiFailureError",
    "ni_plan",
    "rt_detect",
    "check_property6",
    "torque_only_trajectory",
    "traversal_time",
]

DEFAULT_SWITCH_CAP = 200


class UntraversableError(RuntimeError):
    """An acceleration profile collapsed to sdot = 0: no profile passes."""

    def __init__(self, s: float):
        super().__init__(f"path not traversable: forward profile reaches sdot=0 at s={s!r}")
        self.s = float(s)


class NiFailureError(RuntimeError):
    """A backward profile left the admissible region without meeting the chain."""

    def __init__(self, origin: PhasePoint, profile: PhaseProfile, terminal: bool):
        where = "terminal point" if terminal else "switch point"
        super().__init__(
            f"planner failure: deceleration from {where} s={origin.s!r} exits the admissible "
            f"region ({profile.termination.value}) without intersecting the chain"
        )
        self.origin = origin
        self.profile = profile
        self.terminal = terminal


@dataclass
class _Piece:
    profile: PhaseProfile
    lo: float
    hi: float
    ba_point: PhasePoint | None = None   # on beta pieces: where a later alpha cut in
    ab_point: SwitchPoint | None = None  # on alpha pieces: the switch that spawned them

    @property
    def kind(self) -> str:
        return self.profile.kind

    def active(self) -> PhaseProfile:
        return self.profile.slice_between(self.lo, self.hi)


class _Chain:
    """Alternating profile pieces forming the current trajectory prefix."""

    def __init__(self):
        self.pieces: list[_Piece] = []
        self.superseded: list[tuple[PhasePoint, PhasePoint]] = []
        self.dropped_ab: list[SwitchPoint] = []

    def __bool__(self):
        return bool(self.pieces)

    @property
    def last(self) -> _Piece:
        return self.pieces[-1]

    @property
    def end_s(self) -> float:
        return self.pieces[-1].hi if self.pieces else 0.0

    def append(self, piece: _Piece):
        self.pieces.append(piece)

    def intersect_and_cut(self, alpha_profile: PhaseProfile) -> PhasePoint | None:
        """Earliest-s meeting of a backward profile with the chain.

        Pieces are scanned in increasing s; only acceleration pieces are
        candidates (two deceleration profiles cannot cross). On a hit the
        chain is truncated there and the replaced transition, if any, is
        logged as superseded.
        """
        for idx, piece in enumerate(self.pieces):
            if piece.kind != "beta":
                continue
            hit = intersect_profiles(piece.active(), alpha_profile)
            if hit is None:
                continue
            old = piece.ba_point
            piece.hi = hit.s
            piece.ba_point = hit
            for dropped in self.pieces[idx + 1 :]:
                if dropped.ab_point is not None:
                    self.dropped_ab.append(dropped.ab_point)
            del self.pieces[idx + 1 :]
            if old is not None:
                self.superseded.append((old, hit))
            return hit
        return None


@dataclass
class Trajectory:
    """Ordered alternating profile segments with switch bookkeeping."""

    segments: list[PhaseProfile]
    switch_ab: list[SwitchPoint]
    switch_ba: list[PhasePoint]
    superseded_ba: list[tuple[PhasePoint, PhasePoint]]
    dropped_ab: list[SwitchPoint]
    traversal_time: float
    s_end: float
    _s: np.ndarray = field(default=None, repr=False)
    _z: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self._s is None:
            self._s, self._z = _concatenate_segments(self.segments)

    @property
    def s_samples(self) -> np.ndarray:
        return self._s

    @property
    def z_samples(self) -> np.ndarray:
        return self._z

    @property
    def start(self) -> PhasePoint:
        return PhasePoint(float(self._s[0]), math.sqrt(max(self._z[0], 0.0)))

    @property
    def end(self) -> PhasePoint:
        return PhasePoint(float(self._s[-1]), math.sqrt(max(self._z[-1], 0.0)))

    @property
    def coverage(self) -> float:
        return float(self._s[-1])

    def sdot_at(self, s):
        return np.sqrt(np.maximum(np.interp(s, self._s, self._z), 0.0))


@dataclass(frozen=True)
class BreakRecord:
    """One failed reconnection attempt during failure detection."""

    origin: PhasePoint
    switch: SwitchPoint | None
    profile_end: PhasePoint
    termination: Termination


@dataclass
class RtReport:
    feasible: bool
    s_last: float
    trajectory: Trajectory
    continuity_log: list[bool]
    failure_segments: list[tuple[float, float]]
    breaks: list[BreakRecord]


@dataclass
class Property6Report:
    c1: bool
    c1_witness_s: float | None
    c2: bool
    c2_offenders: list[SwitchPoint]
    mvc_ddagger_segments: list[tuple[float, float]]

    @property
    def holds(self) -> bool:
        return self.c1 and self.c2


def _mask_runs(mask: np.ndarray):
    """Index pairs (first, last) of each maximal True run."""
    idx = np.nonzero(mask)[0]
    if idx.size == 0:
        return []
    cuts = np.nonzero(np.diff(idx) > 1)[0]
    starts = np.concatenate([[0], cuts + 1])
    stops = np.concatenate([cuts, [len(idx) - 1]])
    return [(int(idx[a]), int(idx[b])) for a, b in zip(starts, stops)]


def _concatenate_segments(segments: list[PhaseProfile]):
    ss, zs = [], []
    for seg in segments:
        ss.append(seg.s)
        zs.append(seg.z)
    s = np.concatenate(ss) if ss else np.array([0.0])
    z = np.concatenate(zs) if zs else np.array([0.0])
    keep = np.concatenate([[True], np.diff(s) > 0.0])
    return s[keep], z[keep]


def traversal_time(s: np.ndarray, z: np.ndarray) -> float:
    """Time to traverse a sampled squared-velocity profile.

    Per cell the profile is linear in z, for which the exact cell time is
    ``2*ds / (sdot_0 + sdot_1)``; this regularizes cells that start or
    end at rest.
    """
    ds = np.diff(s)
    v = np.sqrt(np.maximum(z, 0.0))
    pair = v[:-1] + v[1:]
    with np.errstate(divide="ignore"):
        dt = np.where(ds > 0.0, 2.0 * ds / np.where(pair > 0.0, pair, np.inf), 0.0)
    return float(np.sum(dt))


def _switch_starts(sp: SwitchPoint, step: float):
    """Integration starts for the profiles leaving a switch point.

    At a zero-inertia point the extremal accelerations are singular, so
    integration restarts a fraction of a step beyond the row zero; the
    switch location itself is kept as a profile anchor.
    """
    loc = sp.location
    if sp.type != "zero-inertia":
        return loc, loc, None
    eps = step / 10.0
    back = PhasePoint(max(loc.s - eps, 0.0), loc.sdot)
    fwd = PhasePoint(loc.s + eps, loc.sdot)
    return back, fwd, loc


def _assemble(chain: _Chain, s_end: float) -> Trajectory:
    segments: list[PhaseProfile] = []
    switch_ab: list[SwitchPoint] = []
    switch_ba: list[PhasePoint] = []
    tol = 1e-12 * max(1.0, s_end)
    for piece in chain.pieces:
        if piece.hi - piece.lo <= tol:
            continue
        segments.append(piece.active())
        if piece.kind == "beta" and piece.ba_point is not None:
            switch_ba.append(piece.ba_point)
        if piece.kind == "alpha" and piece.ab_point is not None:
            switch_ab.append(piece.ab_point)
    s, z = _concatenate_segments(segments)
    return Trajectory(
        segments=segments,
        switch_ab=switch_ab,
        switch_ba=switch_ba,
        superseded_ba=list(chain.superseded),
        dropped_ab=list(chain.dropped_ab),
        traversal_time=traversal_time(s, z),
        s_end=s_end,
        _s=s,
        _z=z,
    )


def ni_plan(
    cp: ConstraintProfile,
    limits: LimitCurves,
    sdot0: float = 0.0,
    sdot_end: float = 0.0,
    *,
    step: float | None = None,
    switch_cap: int = DEFAULT_SWITCH_CAP,
) -> Trajectory:
    """Plan the time-optimal trajectory; raises on failure.

    Raises :class:`UntraversableError` when a forward profile collapses
    to rest, and :class:`NiFailureError` when a backward profile exits
    the admissible region without meeting the chain (diagnose such
    instances with :func:`rt_detect`).
    """
    s_end = cp.s_end
    step = step if step is not None else s_end / 4000.0
    chain = _Chain()

    beta0 = integrate_beta(cp, limits, PhasePoint(0.0, sdot0), step=step)
    if beta0.termination is Termination.HIT_SDOT_ZERO:
        raise UntraversableError(beta0.end.s)
    chain.append(_Piece(beta0, beta0.s_lo, beta0.s_hi))

    n_switch = 0
    while chain.last.profile.termination is Termination.HIT_LIMIT:
        sp = find_next_switch(cp, limits, chain.last.hi)
        if sp is None:
            break
        n_switch += 1
        if n_switch > switch_cap:
            raise RuntimeError(
                f"switch-point cap exceeded ({switch_cap}): planner is not converging"
            )
        back_start, fwd_start, anchor = _switch_starts(sp, step)
        alpha_p = integrate_alpha(cp, limits, back_start, step=step, anchor=anchor)
        hit = chain.intersect_and_cut(alpha_p)
        if hit is None:
            raise NiFailureError(sp.location, alpha_p, terminal=False)
        chain.append(_Piece(alpha_p, hit.s, sp.location.s, ab_point=sp))
        beta_p = integrate_beta(cp, limits, fwd_start, step=step, anchor=anchor)
        if beta_p.termination is Termination.HIT_SDOT_ZERO:
            raise UntraversableError(beta_p.end.s)
        chain.append(_Piece(beta_p, sp.location.s, beta_p.s_hi))

    alpha_e = integrate_alpha(cp, limits, PhasePoint(s_end, sdot_end), step=step)
    hit = chain.intersect_and_cut(alpha_e)
    if hit is None:
        raise NiFailureError(PhasePoint(s_end, sdot_end), alpha_e, terminal=True)
    chain.append(_Piece(alpha_e, hit.s, s_end))
    return _assemble(chain, s_end)


def rt_detect(
    cp: ConstraintProfile,
    limits: LimitCurves,
    sdot0: float = 0.0,
    sdot_end: float = 0.0,
    *,
    step: float | None = None,
    switch_cap: int = DEFAULT_SWITCH_CAP,
) -> RtReport:
    """Run the planner while tracking the longest continuous prefix.

    Unlike :func:`ni_plan` this never raises on planning failure: each
    backward profile that misses the prefix marks a discontinuity, the
    iteration continues from the next switch point, and the verdict
    compares the prefix coverage ``s_last`` against the path length.
    """
    s_end = cp.s_end
    step = step if step is not None else s_end / 4000.0
    eps_s = 1e-6 * s_end

    chain = _Chain()
    continuity: list[bool] = []
    breaks: list[BreakRecord] = []
    is_continuous = True
    s_last = 0.0
    terminal_connected = False

    p = PhasePoint(0.0, sdot0)
    p_anchor: PhasePoint | None = None
    iterations = 0
    while True:
        iterations += 1
        if iterations > switch_cap:
            raise RuntimeError(
                f"switch-point cap exceeded ({switch_cap}): failure detection is not converging"
            )
        beta_p = integrate_beta(cp, limits, p, step=step, anchor=p_anchor)
        if is_continuous:
            chain.append(_Piece(beta_p, beta_p.s_lo, beta_p.s_hi))
            s_last = beta_p.s_hi

        sp = find_next_switch(cp, limits, beta_p.s_hi)
        if sp is None:
            q = PhasePoint(s_end, sdot_end)
            back_start, fwd_start, anchor = q, q, None
        else:
            q = sp.location
            back_start, fwd_start, anchor = _switch_starts(sp, step)

        alpha_p = integrate_alpha(cp, limits, back_start, step=step, anchor=anchor)
        hit = chain.intersect_and_cut(alpha_p) if chain else None
        if hit is not None:
            chain.append(_Piece(alpha_p, hit.s, q.s, ab_point=sp))
            is_continuous = True
            s_last = q.s
        else:
            is_continuous = False
            breaks.append(BreakRecord(q, sp, alpha_p.end, alpha_p.termination))
        continuity.append(is_continuous)

        if sp is None:
            terminal_connected = hit is not None
            break
        p = fwd_start
        p_anchor = anchor

    feasible = (s_last >= s_end - eps_s) and terminal_connected
    trajectory = _assemble(chain, s_end)
    failure_segments = [
        (lo, hi) for lo, hi in limits.dagger_segments if hi > s_last + eps_s
    ] if not feasible else []
    return RtReport(
        feasible=feasible,
        s_last=float(s_last),
        trajectory=trajectory,
        continuity_log=continuity,
        failure_segments=failure_segments,
        breaks=breaks,
    )


def torque_only_trajectory(
    cp: ConstraintProfile,
    sdot0: float = 0.0,
    sdot_end: float = 0.0,
    *,
    grid_n: int = 2000,
    step: float | None = None,
) -> tuple[Trajectory, LimitCurves]:
    """Plan against the acceleration rows alone (velocity rows ignored)."""
    cp_acc = cp.without_velocity()
    limits_acc = compute_limit_curves(cp_acc, grid_n)
    traj = ni_plan(cp_acc, limits_acc, sdot0, sdot_end, step=step)
    return traj, limits_acc


def check_property6(
    cp: ConstraintProfile,
    limits: LimitCurves,
    trajectory_unbounded: Trajectory,
    *,
    eps: float | None = None,
) -> Property6Report:
    """Sufficient-condition check for planning failure under the fused limit.

    C1: the fused limit dips below the acceleration-only optimal profile
    somewhere. C2: the velocity-bound stretches contain no discontinuity
    or zero-inertia switch candidates. When both hold the chain cannot
    reconnect across the dip, so failure detection must report
    infeasible; the reverse is not implied.
    """
    from .switchpoints import _candidates

    grid = limits.grid
    eps = eps if eps is not None else 1e-7 * limits.velocity_scale
    traj_sdot = trajectory_unbounded.sdot_at(grid)
    viol = limits.mvc_star < (traj_sdot - eps)
    c1 = bool(np.any(viol))
    witness = float(grid[viol][0]) if c1 else None

    offenders = [
        cand
        for cand in _candidates(cp, limits)
        if cand.type in ("discontinuity", "zero-inertia")
        and any(lo + 1e-12 < cand.location.s < hi - 1e-12 for lo, hi in limits.dagger_segments)
    ]
    c2 = len(offenders) == 0

    ddagger: list[tuple[float, float]] = []
    for lo, hi in limits.dagger_segments:
        inside = (grid >= lo) & (grid <= hi) & (limits.vlim < traj_sdot - eps)
        for i0, i1 in _mask_runs(inside):
            ddagger.append((float(grid[i0]), float(grid[i1])))

    return Property6Report(
        c1=c1,
        c1_witness_s=witness,
        c2=c2,
        c2_offenders=offenders,
        mvc_ddagger_segments=ddagger,
    )
