"""Collision criteria for 2- and 3-peak solutions.

Indices of peaks are 1-based in everything returned from here
(``distribution_flag``, verdict witnesses), matching the labels
``q1, q2, q3``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import PeakonState, check_positions
from .errors import Degenerate, NotColliding, OnBoundary, WrongArity
from .invariants import h0, h1, hhat

DEGENERATE_TOL = 1e-15


class Outcome(str, enum.Enum):
    COLLIDES = "Collides"
    ESCAPES = "Escapes"
    POSSIBLE_COLLISION = "PossibleCollision"


class Sector(str, enum.Enum):
    I = "I"  # noqa: E741
    II = "II"
    III = "III"
    IV = "IV"


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    bound_time: Optional[float] = None
    condition_fired: Optional[str] = None
    witnesses: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"outcome": self.outcome.value}
        if self.bound_time is not None:
            out["bound_time"] = self.bound_time
        if self.condition_fired is not None:
            out["condition_fired"] = self.condition_fired
        out.update(self.witnesses)
        return out


def _need(state: PeakonState, n: int):
    if state.n != n:
        raise WrongArity(f"expected {n} peaks, got {state.n}")


def _require_nonzero_momenta(state: PeakonState):
    if np.any(state.p == 0):
        raise OnBoundary(f"momenta {state.p} contain a zero; the state is a lower-order peakon")


def foliation_invariants_2d(q) -> tuple[float, float]:
    """``(e^q1 - e^q2, e^-q1 - e^-q2)``: constant along geodesics with ``p1 = 0`` resp. ``p2 = 0``."""
    q = check_positions(q)
    if q.size != 2:
        raise WrongArity(f"expected 2 peaks, got {q.size}")
    return float(np.exp(q[0]) - np.exp(q[1])), float(np.exp(-q[0]) - np.exp(-q[1]))


def classify_sector_2d(state: PeakonState) -> Sector:
    """Sector by momentum signs: I for ``p1 < 0 < p2`` (headed for collision)."""
    _need(state, 2)
    _require_nonzero_momenta(state)
    p1, p2 = state.p
    if p1 < 0 < p2:
        return Sector.I
    if p2 < 0 < p1:
        return Sector.IV
    if p1 > 0:
        return Sector.II
    return Sector.III


def collision_bound_2d(state: PeakonState) -> float:
    """Upper bound on the collision time of a twopeakon in sector I.

    ``t* = 2 sqrt(1 - y) / (y sqrt((1 + y)(2 H1 - H0^2)))`` with
    ``y = exp(q2 - q1)`` at the initial state.
    """
    _need(state, 2)
    p1, p2 = state.p
    if not p1 < 0 < p2:
        raise NotColliding(f"bound needs p1 < 0 < p2, got p={state.p}")
    y = math.exp(state.q[1] - state.q[0])
    # 2 H1 - H0^2 = 2 p1 p2 (e^-z - 1), evaluated without cancellation
    energy = 2.0 * p1 * p2 * math.expm1(state.q[1] - state.q[0])
    if energy <= DEGENERATE_TOL:
        raise Degenerate(f"2 H1 - H0^2 = {energy:.3e} is not positive")
    one_minus_y = -math.expm1(state.q[1] - state.q[0])
    return 2.0 * math.sqrt(one_minus_y) / (y * math.sqrt((1.0 + y) * energy))


def escape_witnesses(state: PeakonState) -> dict:
    """``h = p1 - p2`` and ``a^2 = 4 H1 - H0^2``; ``dh/dt = (a^2 - h^2) / 2`` along the flow."""
    _need(state, 2)
    a0, a1 = h0(state), h1(state)
    return {"h": float(state.p[0] - state.p[1]), "a_sq": float(4.0 * a1 - a0 * a0)}


def _signs(state):
    return [int(np.sign(x)) for x in state.p]


def predict_2d(state: PeakonState) -> Verdict:
    """Twopeakons collide exactly when ``p1 < 0 < p2``; otherwise the gap grows without bound."""
    _need(state, 2)
    _require_nonzero_momenta(state)
    witnesses = escape_witnesses(state)
    witnesses["hhat"] = hhat(state)
    witnesses["signs"] = _signs(state)
    if classify_sector_2d(state) is Sector.I:
        return Verdict(Outcome.COLLIDES, bound_time=collision_bound_2d(state), witnesses=witnesses)
    return Verdict(Outcome.ESCAPES, witnesses=witnesses)


def necessary_3d(state: PeakonState) -> Verdict:
    """Threepeakon screen: a collision needs ``p1 < 0 < p2`` or ``p2 < 0 < p3``.

    Only necessity is known, so the positive answer is ``PossibleCollision``.
    """
    _need(state, 3)
    _require_nonzero_momenta(state)
    p1, p2, p3 = state.p
    fired = []
    if p1 < 0 < p2:
        fired.append("cond3D1")
    if p2 < 0 < p3:
        fired.append("cond3D2")
    witnesses = {"h": None, "a_sq": None, "hhat": hhat(state), "signs": _signs(state)}
    if not fired:
        return Verdict(Outcome.ESCAPES, witnesses=witnesses)
    return Verdict(Outcome.POSSIBLE_COLLISION, condition_fired=",".join(fired), witnesses=witnesses)


def predict(state: PeakonState) -> Verdict:
    if state.n == 2:
        return predict_2d(state)
    if state.n == 3:
        return necessary_3d(state)
    raise WrongArity(f"prediction needs 2 or 3 peaks, got {state.n}")


# ---------------------------------------------------------------------------
# distributions of the threepeakon


def alpha_form_3d(q) -> np.ndarray:
    """One-form annihilating ``{p2 = 0}``, spanned by ``(e^-qi)`` and ``(e^qi)``."""
    q = check_positions(q)
    if q.size != 3:
        raise WrongArity(f"expected 3 peaks, got {q.size}")
    q1, q2, q3 = q
    return np.array(
        [
            np.exp(q2 - q1) - np.exp(2 * q3 - q1 - q2),
            np.expm1(2 * (q3 - q1)),
            np.exp(q3 - q2) - np.exp(q2 + q3 - 2 * q1),
        ]
    )


def _alpha_jacobian(q) -> np.ndarray:
    """``J[i, j] = d alpha_i / d q_j`` differentiated by hand."""
    q1, q2, q3 = q
    a = np.exp(q2 - q1)
    b = np.exp(2 * q3 - q1 - q2)
    c = np.exp(2 * q3 - 2 * q1)
    d = np.exp(q3 - q2)
    e = np.exp(q2 + q3 - 2 * q1)
    return np.array(
        [
            [-a + b, a + b, -2 * b],
            [-2 * c, 0.0, 2 * c],
            [2 * e, -d - e, d - e],
        ]
    )


def _defect(coeffs, jac) -> float:
    # coefficient of d(alpha) ^ alpha on dq1 ^ dq2 ^ dq3 is alpha . curl(alpha)
    curl = np.array(
        [
            jac[2, 1] - jac[1, 2],
            jac[0, 2] - jac[2, 0],
            jac[1, 0] - jac[0, 1],
        ]
    )
    return float(coeffs @ curl)


def integrability_defect_3d(q) -> float:
    """``d alpha ^ alpha`` for the annihilator of ``{p2 = 0}``; nonzero means non-integrable."""
    alpha = alpha_form_3d(q)
    return _defect(alpha, _alpha_jacobian(np.asarray(q, dtype=float)))


def integrability_defect_fd(form, q, step: float = 1e-6) -> float:
    """Same coefficient for any one-form ``form(q)``, with a central-difference Jacobian."""
    q = np.asarray(q, dtype=float)
    jac = np.empty((3, 3))
    for j in range(3):
        dq = np.zeros(3)
        dq[j] = step
        jac[:, j] = (np.asarray(form(q + dq)) - np.asarray(form(q - dq))) / (2 * step)
    return _defect(np.asarray(form(q), dtype=float), jac)


def annihilator_d1(q) -> np.ndarray:
    """One-form annihilating ``{p1 = 0}``: ``dq1 - e^{-(q1 - q2)} dq2``."""
    q = np.asarray(q, dtype=float)
    return np.array([1.0, -np.exp(q[1] - q[0]), 0.0])


def annihilator_d3(q) -> np.ndarray:
    """One-form annihilating ``{p3 = 0}``: ``dq3 - e^{-(q2 - q3)} dq2``."""
    q = np.asarray(q, dtype=float)
    return np.array([0.0, -np.exp(q[2] - q[1]), 1.0])


def distribution_spans_3d(q) -> dict:
    """Spanning fields of the three horizontal distributions, keyed 1..3."""
    q = check_positions(q)
    if q.size != 3:
        raise WrongArity(f"expected 3 peaks, got {q.size}")
    em, ep = np.exp(-q), np.exp(q)
    return {
        1: (np.array([em[0], em[1], 0.0]), np.array([0.0, 0.0, 1.0])),
        2: (em, ep),
        3: (np.array([0.0, ep[1], ep[2]]), np.array([1.0, 0.0, 0.0])),
    }


def distribution_flag(state: PeakonState, tol: float = 1e-12) -> set:
    """1-based indices ``i`` with ``|p_i| <= tol`` (velocity horizontal to the i-th distribution)."""
    return {i + 1 for i, x in enumerate(state.p) if abs(x) <= tol}
