"""Self-verification suites: closed forms checked against independent oracles.

Each suite returns ``(passed, detail)``.  Suites look up library
functions through their modules at call time, so a patched function is
what gets verified.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import collision, core, geometry, invariants


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _random_q(rng, n, lo, hi):
    gaps = rng.uniform(lo, hi, size=n - 1)
    base = rng.uniform(-2.0, 2.0)
    return base - np.concatenate([[0.0], np.cumsum(gaps)])


def suite_metric(rng, count=100):
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(1, 4))
        q = _random_q(rng, n, 0.05, 5.0)
        g = core.metric_matrix(q)
        ref = np.linalg.inv(core.e_matrix(q))
        worst = max(worst, float(np.max(np.abs(g @ core.e_matrix(q) - np.eye(n)))))
        worst = max(worst, float(np.max(np.abs(g - ref)) / max(1.0, np.max(np.abs(ref)))))
    return worst < 1e-12, f"max residual {worst:.2e} (tol 1e-12)"


def suite_eom(rng, count=100, step=1e-6):
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(2, 4))
        q = _random_q(rng, n, 0.1, 3.0)
        p = rng.uniform(-2.0, 2.0, size=n)
        qdot, pdot = core.eom_rhs(core.PeakonState(q, p))
        for i in range(n):
            dp = np.zeros(n)
            dp[i] = step
            dH_dp = (core.hamiltonian(core.PeakonState(q, p + dp)) - core.hamiltonian(core.PeakonState(q, p - dp))) / (2 * step)
            dH_dq = (core.hamiltonian(core.PeakonState(q + dp, p)) - core.hamiltonian(core.PeakonState(q - dp, p))) / (2 * step)
            worst = max(worst, abs(dH_dp - qdot[i]), abs(-dH_dq - pdot[i]))
    return worst < 1e-6, f"max |FD - analytic| {worst:.2e} (tol 1e-6)"


def suite_riemann(rng, count=20):
    worst = 0.0
    for _ in range(count):
        q = _random_q(rng, 3, 0.5, 5.0)
        closed = geometry.riemann_3d(q).tensor()
        fd = geometry.riemann_tensor_fd(q)
        mask = np.abs(fd) > 1e-10
        worst = max(worst, float(np.max(np.abs(closed[mask] - fd[mask]) / np.abs(fd[mask]))))
        q2 = _random_q(rng, 2, 0.5, 5.0)
        k_fd = geometry.gauss_curvature_fd(q2)
        if abs(k_fd) > 1e-10:
            worst = max(worst, abs(geometry.gauss_curvature_2d(q2) - k_fd) / abs(k_fd))
    return worst < 1e-5, f"max relative deviation {worst:.2e} (tol 1e-5)"


def suite_hhat(rng, count=100):
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(2, 4))
        s = core.PeakonState(_random_q(rng, n, 0.05, 3.0), rng.uniform(-2.0, 2.0, size=n))
        worst = max(worst, abs(invariants.hhat(s) - invariants.hhat_from_integrals(s)))
    return worst < 1e-12, f"max two-path difference {worst:.2e} (tol 1e-12)"


def suite_rayleigh(rng, count=5, probes=100_000):
    worst = -np.inf
    attain = 0.0
    for _ in range(count):
        M = rng.normal(size=(3, 3))
        A = M + M.T
        L = rng.normal(size=(3, 3))
        B = L @ L.T + 0.1 * np.eye(3)
        lam, vec = geometry.rayleigh_max(A, B)
        Z = rng.normal(size=(probes, 3))
        quot = np.einsum("mi,ij,mj->m", Z, A, Z) / np.einsum("mi,ij,mj->m", Z, B, Z)
        worst = max(worst, float(np.max(quot) - lam))
        attain = max(attain, abs(vec @ A @ vec / (vec @ B @ vec) - lam))
    ok = worst <= 1e-9 and attain <= 1e-9
    return ok, f"max excess over lambda_max {worst:.2e}, attainment gap {attain:.1e} (tol 1e-9)"


def suite_alpha(rng, count=100):
    worst_annihilation = 0.0
    min_defect = np.inf
    worst_flat = 0.0
    worst_fd = 0.0
    for _ in range(count):
        q = _random_q(rng, 3, 0.1, 3.0)
        alpha = collision.alpha_form_3d(q)
        for X in collision.distribution_spans_3d(q)[2]:
            worst_annihilation = max(worst_annihilation, abs(alpha @ X) / np.linalg.norm(X))
        d = collision.integrability_defect_3d(q)
        min_defect = min(min_defect, abs(d))
        worst_fd = max(worst_fd, abs(d - collision.integrability_defect_fd(collision.alpha_form_3d, q)))
        worst_flat = max(worst_flat, abs(collision.integrability_defect_fd(collision.annihilator_d1, q)))
    ok = worst_annihilation < 1e-12 and min_defect > 1e-10 and worst_flat < 1e-10 and worst_fd < 1e-6
    detail = (
        f"annihilation {worst_annihilation:.1e}, min |defect| {min_defect:.2e}, "
        f"D1 defect {worst_flat:.1e}, FD gap {worst_fd:.1e}"
    )
    return ok, detail


SUITES = {
    "metric": suite_metric,
    "eom": suite_eom,
    "riemann": suite_riemann,
    "hhat": suite_hhat,
    "rayleigh": suite_rayleigh,
    "alpha": suite_alpha,
}


def run_verification(only=None, seed: int = 0) -> list[SuiteResult]:
    names = list(SUITES) if not only else list(only)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suites: {unknown}; choose from {sorted(SUITES)}")
    results = []
    for name in names:
        rng = np.random.default_rng([seed, list(SUITES).index(name)])
        t0 = time.perf_counter()
        try:
            passed, detail = SUITES[name](rng)
        except Exception as exc:  # a crashing suite is a failing suite
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(SuiteResult(name, bool(passed), detail, time.perf_counter() - t0))
    return results
