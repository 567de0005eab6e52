"""First integrals of the peakon flow and drift monitoring."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import PeakonState, hamiltonian, metric_matrix, velocity_from_momentum
from .errors import WrongArity


@dataclass(frozen=True)
class InvariantVector:
    h0: float
    h1: float
    h2: Optional[float] = None
    hhat: Optional[float] = None


def h0(state: PeakonState) -> float:
    """Total momentum, conserved because translations are isometries."""
    return float(np.sum(state.p))


def h1(state: PeakonState) -> float:
    return hamiltonian(state)


def _h2_terms(q1, q2, q3, p1, p2, p3):
    # Expanded, H2 is (1/3) sum p_i^3 + sum_{i<j} e_ij p_i p_j (p_i + p_j) + 2 e_13 p1 p2 p3
    # with e_ij = exp(-(q_i - q_j)).  Near a collision the momenta blow up
    # and those cubic terms cancel catastrophically; the identical form
    # below keeps every term of the size of the result.
    a12 = np.expm1(-(q1 - q2))
    a23 = np.expm1(-(q2 - q3))
    a13 = np.expm1(-(q1 - q3))
    s = p1 + p2 + p3
    return (
        s**3 / 3.0
        + a12 * p1 * p2 * (p1 + p2)
        + a23 * p2 * p3 * (p2 + p3)
        + a13 * p1 * p3 * (p1 + p3)
        + 2.0 * a13 * p1 * p2 * p3
    )


def h2_threepeakon(state: PeakonState) -> float:
    """Cubic first integral of the threepeakon.

    Uses decaying exponentials ``exp(-(q_i - q_j))`` and cubic pure terms;
    this is the unique cubic making ``H2 - H0 H1 + H0^3/6`` equal the
    factored product in :func:`hhat`.
    """
    if state.n != 3:
        raise WrongArity(f"H2 is only defined here for n=3, got n={state.n}")
    return float(_h2_terms(*state.q, *state.p))


def hhat(state: PeakonState) -> float:
    """Factored form of the combined integral whose zero set is ``{some p_i = 0}``."""
    if state.n == 2:
        z = state.q[0] - state.q[1]
        return float(state.p[0] * state.p[1] * np.expm1(-z))
    if state.n == 3:
        q1, q2, q3 = state.q
        factor = 1.0 + np.exp(-(q1 - q3)) - np.exp(-(q1 - q2)) - np.exp(-(q2 - q3))
        return float(np.prod(state.p) * factor)
    raise WrongArity(f"hhat needs n in (2, 3), got n={state.n}")


def hhat_from_integrals(state: PeakonState) -> float:
    """Same quantity as :func:`hhat`, built from H0, H1 (and H2)."""
    a, b = h0(state), h1(state)
    if state.n == 2:
        return b - 0.5 * a * a
    if state.n == 3:
        return h2_threepeakon(state) - a * b + a**3 / 6.0
    raise WrongArity(f"hhat needs n in (2, 3), got n={state.n}")


def invariant_vector(state: PeakonState) -> InvariantVector:
    return InvariantVector(
        h0=h0(state),
        h1=h1(state),
        h2=h2_threepeakon(state) if state.n == 3 else None,
        hhat=hhat(state) if state.n in (2, 3) else None,
    )


def killing_pairing(state: PeakonState) -> float:
    """``g(qdot, X)`` for the translation field ``X = (1, ..., 1)``.

    Evaluated through the metric explicitly so it is an independent check
    on H0.
    """
    qdot = velocity_from_momentum(state.q, state.p)
    X = np.ones(state.n)
    return float(X @ metric_matrix(state.q) @ qdot)


def invariant_series(q: np.ndarray, p: np.ndarray) -> dict[str, np.ndarray]:
    """H0, H1 (and H2 for n=3) for stacked samples ``q, p`` of shape (m, n)."""
    q = np.atleast_2d(q)
    p = np.atleast_2d(p)
    K = np.exp(-np.abs(q[:, :, None] - q[:, None, :]))
    out = {
        "H0": p.sum(axis=1),
        "H1": 0.5 * np.einsum("mi,mij,mj->m", p, K, p),
    }
    if q.shape[1] == 3:
        out["H2"] = _h2_terms(*q.T, *p.T)
    return out


@dataclass(frozen=True)
class DriftReport:
    """Max of ``|I(t) - I(0)| / max(1, |I(0)|)`` per invariant."""

    drifts: dict

    def __getitem__(self, key):
        return self.drifts[key]

    def max(self) -> float:
        return max(self.drifts.values()) if self.drifts else 0.0

    def as_dict(self) -> dict:
        return dict(self.drifts)


def relative_drift(series: np.ndarray) -> float:
    series = np.asarray(series, dtype=float)
    ref = series[0]
    return float(np.max(np.abs(series - ref)) / max(1.0, abs(ref)))


def invariant_drift(trajectory) -> DriftReport:
    """Drift of every recorded invariant along ``trajectory``."""
    series = trajectory.invariants
    return DriftReport({name: relative_drift(vals) for name, vals in series.items()})
