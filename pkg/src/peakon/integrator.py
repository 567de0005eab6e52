"""Adaptive Dormand-Prince integration of the peakon flow with collision events.

Step control follows Hairer, Norsett & Wanner (Solving ODEs I, II.4).
Samples land exactly on multiples of ``sample_dt`` (the step is clipped
to reach them), so every recorded state is an integrator state rather
than an interpolant.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import PeakonState, momentum_from_velocity
from .errors import GeodesicLeftDomain, OutOfDomain
from .invariants import invariant_series

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B_LOW = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_ERR = _B - _B_LOW

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_EVENT_REL_WIDTH = 1e-9


class Status(str, enum.Enum):
    REACHED_HORIZON = "ReachedHorizon"
    COLLISION_STOP = "CollisionStop"
    STEP_FAILURE = "StepFailure"


@dataclass(frozen=True)
class IntegratorOptions:
    horizon: float = 10.0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    gap_eps: float = 1e-6
    max_step: float = math.inf
    # None records every accepted step
    sample_dt: Optional[float] = None
    min_step: float = 1e-14
    max_steps: int = 5_000_000

    def __post_init__(self):
        for name in ("horizon", "rel_tol", "abs_tol", "gap_eps", "max_step", "min_step"):
            value = getattr(self, name)
            if not value > 0:
                raise OutOfDomain(f"{name} must be positive, got {value}")
        if self.sample_dt is not None and not self.sample_dt > 0:
            raise OutOfDomain(f"sample_dt must be positive, got {self.sample_dt}")


@dataclass(frozen=True)
class CollisionEvent:
    """Bracket ``[t_lo, t_hi]`` in which the gap of peaks ``pair`` drops to ``gap_eps``.

    ``pair`` uses 1-based peak labels, e.g. ``(1, 2)`` for the two rightmost peaks.
    """

    t_lo: float
    t_hi: float
    pair: tuple
    point: tuple


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Samples ``t[k], q[k], p[k]`` plus detected events and the stop reason."""

    t: np.ndarray
    q: np.ndarray
    p: np.ndarray
    events: tuple = ()
    status: Status = Status.REACHED_HORIZON
    invariants: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return int(self.q.shape[1])

    def __len__(self) -> int:
        return int(self.t.size)

    def state(self, k: int) -> PeakonState:
        return PeakonState(self.q[k], self.p[k])

    @property
    def samples(self) -> list:
        return [(float(self.t[k]), self.state(k)) for k in range(len(self))]

    @property
    def final_state(self) -> PeakonState:
        return self.state(-1)

    def min_gaps(self) -> np.ndarray:
        """Smallest adjacent gap at each sample (``inf`` for a single peak)."""
        if self.n < 2:
            return np.full(len(self), np.inf)
        return np.min(self.q[:, :-1] - self.q[:, 1:], axis=1)


def _rhs(y: np.ndarray, n: int) -> np.ndarray:
    q = y[:n]
    p = y[n:]
    d = q[:, None] - q[None, :]
    K = np.exp(-np.abs(d))
    out = np.empty_like(y)
    out[:n] = K @ p
    out[n:] = p * ((np.sign(d) * K) @ p)
    return out


def _dp_step(y, f0, h, n):
    """One Dormand-Prince step; returns (y_new, f_new, error vector)."""
    k = [f0]
    for i in range(1, 7):
        dy = np.zeros_like(y)
        for j, a in enumerate(_A[i]):
            if a:
                dy += a * k[j]
        k.append(_rhs(y + h * dy, n))
    y_new = y + h * sum(b * kj for b, kj in zip(_B, k) if b)
    err = h * sum(e * kj for e, kj in zip(_ERR, k) if e)
    return y_new, k[6], err


def _error_norm(err, y, y_new, opts):
    scale = opts.abs_tol + opts.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _initial_step(y, f0, n, opts):
    scale = opts.abs_tol + opts.rel_tol * np.abs(y)
    d0 = np.sqrt(np.mean((y / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, opts.horizon, opts.max_step)
    f1 = _rhs(y + h0 * f0, n)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, opts.horizon, opts.max_step)


def _min_gap(y, n):
    if n < 2:
        return math.inf
    q = y[:n]
    return float(np.min(q[:-1] - q[1:]))


def _refine_event(t_lo, y_lo, t_hi, y_hi, n, gap_eps):
    """Bisect the crossing of ``min gap = gap_eps`` by re-integrating from ``t_lo``.

    Each trial point is reached with one fresh step from the current lower
    bracket end; the step is never longer than the accepted step that
    produced the bracket.
    """
    while t_hi - t_lo > _EVENT_REL_WIDTH * max(1.0, t_hi):
        t_mid = 0.5 * (t_lo + t_hi)
        if not t_lo < t_mid < t_hi:
            break
        y_mid, _, _ = _dp_step(y_lo, _rhs(y_lo, n), t_mid - t_lo, n)
        if _min_gap(y_mid, n) <= gap_eps:
            t_hi, y_hi = t_mid, y_mid
        else:
            t_lo, y_lo = t_mid, y_mid
    return t_lo, y_lo, t_hi, y_hi


def integrate(state0: PeakonState, opts: IntegratorOptions | None = None) -> Trajectory:
    """Integrate Hamilton's equations from ``state0`` up to ``opts.horizon``.

    Stops early at the first time an adjacent gap falls to ``opts.gap_eps``
    (status ``CollisionStop``) or when the step size underflows
    ``opts.min_step`` (status ``StepFailure``; the partial trajectory is
    returned).
    """
    opts = opts or IntegratorOptions()
    n = state0.n
    if n >= 2 and not float(np.min(state0.gaps())) > opts.gap_eps:
        raise OutOfDomain(
            f"initial minimum gap {np.min(state0.gaps()):.3e} must exceed gap_eps={opts.gap_eps}"
        )

    y = np.concatenate([state0.q, state0.p]).astype(float)
    t = 0.0
    ts = [t]
    ys = [y]
    events = []
    status = Status.REACHED_HORIZON

    f = _rhs(y, n)
    h = _initial_step(y, f, n, opts)
    k_sample = 1
    steps = 0

    while t < opts.horizon:
        if opts.sample_dt is not None:
            target = min(opts.horizon, k_sample * opts.sample_dt)
        else:
            target = opts.horizon
        h = min(h, opts.max_step)
        h_free = h
        landing = t + h >= target * (1 - 4 * np.finfo(float).eps)
        if landing:
            h = target - t
        if h < opts.min_step or steps >= opts.max_steps:
            status = Status.STEP_FAILURE
            break
        steps += 1

        y_new, f_new, err = _dp_step(y, f, h, n)
        enorm = _error_norm(err, y, y_new, opts) if np.all(np.isfinite(y_new)) else math.inf
        if enorm > 1.0:
            factor = _MIN_FACTOR if not np.isfinite(enorm) else max(
                _MIN_FACTOR, _SAFETY * enorm ** (-1 / 5)
            )
            h *= factor
            continue

        t_new = target if landing else t + h
        if _min_gap(y_new, n) <= opts.gap_eps:
            t_lo, y_lo, t_hi, y_hi = _refine_event(t, y, t_new, y_new, n, opts.gap_eps)
            gaps = y_hi[: n - 1] - y_hi[1:n]
            i = int(np.argmin(gaps))
            events.append(
                CollisionEvent(
                    t_lo=float(t_lo),
                    t_hi=float(t_hi),
                    pair=(i + 1, i + 2),
                    point=tuple(float(x) for x in y_hi[:n]),
                )
            )
            ts.append(t_hi)
            ys.append(y_hi)
            status = Status.COLLISION_STOP
            break

        t, y, f = t_new, y_new, f_new
        if opts.sample_dt is None or landing:
            ts.append(t)
            ys.append(y)
            if landing:
                k_sample += 1
        growth = _MAX_FACTOR if enorm == 0 else min(
            _MAX_FACTOR, _SAFETY * enorm ** (-1 / 5)
        )
        # a clipped landing step says nothing about the free step size
        h = max(h_free, h * growth) if landing else h * growth

    Y = np.array(ys)
    q = Y[:, :n].copy()
    p = Y[:, n:].copy()
    return Trajectory(
        t=np.array(ts),
        q=q,
        p=p,
        events=tuple(events),
        status=status,
        invariants=invariant_series(q, p),
    )


def exp_map(q0, v, t: float = 1.0, opts: IntegratorOptions | None = None) -> PeakonState:
    """Geodesic exponential map: follow the geodesic with initial velocity ``v`` for time ``t``.

    Raises :class:`GeodesicLeftDomain` if the geodesic reaches the collision
    set first.
    """
    q0 = np.asarray(q0, dtype=float)
    v = np.asarray(v, dtype=float)
    p0 = momentum_from_velocity(q0, v)
    if t < 0:
        t, p0 = -t, -p0
        flip = True
    else:
        flip = False
    if t == 0 or not np.any(p0):
        return PeakonState(q0, -p0 if flip else p0)
    base = opts or IntegratorOptions()
    run_opts = IntegratorOptions(
        horizon=t,
        rel_tol=base.rel_tol,
        abs_tol=base.abs_tol,
        gap_eps=base.gap_eps,
        max_step=base.max_step,
        sample_dt=None,
        min_step=base.min_step,
        max_steps=base.max_steps,
    )
    traj = integrate(PeakonState(q0, p0), run_opts)
    if traj.status is not Status.REACHED_HORIZON:
        raise GeodesicLeftDomain(
            f"geodesic stopped with {traj.status.value} at t={traj.t[-1]:.6g} < {t}",
            trajectory=traj,
        )
    end = traj.final_state
    return PeakonState(end.q, -end.p if flip else end.p)
