"""Phase space of an n-peakon: Gram matrix, metric, Hamiltonian and flow.

Peaks are ordered from right to left, so a valid configuration has
``q[0] > q[1] > ... > q[n-1]``.  Positions and momenta are stored as
read-only float64 arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfDomain, SingularMatrix, WrongArity

MAX_PEAKS = 3
RESIDUAL_TOL = 1e-12


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.size == 0:
        raise OutOfDomain(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise OutOfDomain(f"{name} has non-finite entries: {arr}")
    arr.setflags(write=False)
    return arr


def check_positions(q, min_gap: float = 0.0) -> np.ndarray:
    """Validate ``q`` as a point of the ordered domain and return it as an array.

    Adjacent gaps must exceed ``min_gap`` (strict inequality, so the
    default only excludes coincident or misordered peaks).
    """
    q = _as_vector(q, "q")
    gaps = q[:-1] - q[1:]
    if gaps.size and not np.all(gaps > min_gap):
        raise OutOfDomain(
            f"positions must be strictly decreasing with gaps > {min_gap}: q={q}"
        )
    return q


def adjacent_gaps(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q[:-1] - q[1:]


@dataclass(frozen=True, eq=False)
class PeakonState:
    """Positions ``q`` and momenta ``p`` of an n-peakon, ``1 <= n <= 3``.

    ``min_gap`` tightens the ordering check; it is not stored.
    """

    q: np.ndarray
    p: np.ndarray
    min_gap: float = field(default=0.0, repr=False, compare=False)

    def __post_init__(self):
        q = check_positions(self.q, self.min_gap)
        p = _as_vector(self.p, "p")
        if p.size != q.size:
            raise WrongArity(f"q and p lengths differ: {q.size} != {p.size}")
        if q.size > MAX_PEAKS:
            raise WrongArity(f"at most {MAX_PEAKS} peaks are supported, got {q.size}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return int(self.q.size)

    def gaps(self) -> np.ndarray:
        return adjacent_gaps(self.q)

    def __eq__(self, other):
        if not isinstance(other, PeakonState):
            return NotImplemented
        return np.array_equal(self.q, other.q) and np.array_equal(self.p, other.p)

    def __hash__(self):
        return hash((self.q.tobytes(), self.p.tobytes()))


def e_matrix(q) -> np.ndarray:
    """Gram matrix ``E_ij = exp(-|q_i - q_j|)``."""
    q = check_positions(q)
    return np.exp(-np.abs(q[:, None] - q[None, :]))


def _metric_closed_form(q: np.ndarray) -> np.ndarray:
    n = q.size
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        z = q[0] - q[1]
        w = np.exp(-z)
        c = 1.0 / -np.expm1(-2.0 * z)
        return c * np.array([[1.0, -w], [-w, 1.0]])
    if n == 3:
        a = q[0] - q[1]
        b = q[1] - q[2]
        u, v = np.exp(-a), np.exp(-b)
        da = -np.expm1(-2.0 * a)
        db = -np.expm1(-2.0 * b)
        mid = -np.expm1(-2.0 * (a + b)) / (da * db)
        return np.array(
            [
                [1.0 / da, -u / da, 0.0],
                [-u / da, mid, -v / db],
                [0.0, -v / db, 1.0 / db],
            ]
        )
    return np.linalg.inv(np.exp(-np.abs(q[:, None] - q[None, :])))


def metric_matrix(q) -> np.ndarray:
    """Peakon metric ``g = E(q)^-1``.

    Closed forms are used for n <= 3.  The result is accepted only if
    ``max|g E - I| < 1e-12 * max(1, max|g|)``; the scale factor lets the
    check follow the conditioning of ``E`` as peaks approach each other.
    """
    q = check_positions(q)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        g = _metric_closed_form(q)
        E = np.exp(-np.abs(q[:, None] - q[None, :]))
        residual = np.max(np.abs(g @ E - np.eye(q.size)))
    scale = max(1.0, float(np.max(np.abs(g))))
    if not np.isfinite(residual) or residual >= RESIDUAL_TOL * scale:
        raise SingularMatrix(
            f"metric inverse residual {residual:.3e} too large at q={q}"
        )
    return g


def hamiltonian(state: PeakonState) -> float:
    """``H = 1/2 <E(q) p, p>``."""
    E = e_matrix(state.q)
    return 0.5 * float(state.p @ E @ state.p)


def eom_rhs(state: PeakonState) -> tuple[np.ndarray, np.ndarray]:
    """Hamilton's equations: returns ``(qdot, pdot)``.

    ``qdot = E p`` and ``pdot_i = p_i sum_{j != i} p_j sign(q_i - q_j) E_ij``.
    """
    qdot, pdot = _flow(state.q, state.p)
    return qdot, pdot


def _flow(q: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = q[:, None] - q[None, :]
    K = np.exp(-np.abs(d))
    return K @ p, p * ((np.sign(d) * K) @ p)


def peakon_field(state: PeakonState, x):
    """Evaluate ``u(x) = sum_i p_i exp(-|x - q_i|)`` (scalar or array ``x``)."""
    x_arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x_arr)):
        raise OutOfDomain("x must be finite")
    u = np.exp(-np.abs(x_arr[..., None] - state.q)) @ state.p
    return float(u) if u.ndim == 0 else u


def momentum_from_velocity(q, v) -> np.ndarray:
    """Covector ``p = g(q) v`` dual to the tangent vector ``v``."""
    q = check_positions(q)
    v = _as_vector(v, "v")
    if v.size != q.size:
        raise OutOfDomain("velocity length does not match positions")
    # solve E p = v rather than forming g, for conditioning near collisions
    return np.linalg.solve(e_matrix(q), v)


def velocity_from_momentum(q, p) -> np.ndarray:
    """Tangent vector ``qdot = E(q) p`` dual to the covector ``p``."""
    q = check_positions(q)
    p = _as_vector(p, "p")
    if p.size != q.size:
        raise OutOfDomain("momentum length does not match positions")
    return e_matrix(q) @ p
