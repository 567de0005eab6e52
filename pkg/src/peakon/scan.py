"""Randomized prediction-versus-simulation scans.

Initial states are drawn up front from a seeded generator, rows are
evaluated (optionally in a process pool) and returned in draw order, so
output depends only on the arguments.
"""
from __future__ import annotations

import io
import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .collision import Outcome, predict
from .core import PeakonState
from .integrator import IntegratorOptions, Status, integrate

GAP_RANGE = (0.2, 3.0)
MOMENTUM_RANGE = (0.2, 2.0)
ESCAPE_HORIZON = 50.0
BOUND_SLACK = 1e-6


@dataclass(frozen=True)
class ScanConfig:
    n: int = 2
    samples: int = 200
    seed: int = 7
    gap_range: tuple = GAP_RANGE
    momentum_range: tuple = MOMENTUM_RANGE
    excluded_only: bool = False
    horizon: float = ESCAPE_HORIZON
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    gap_eps: float = 1e-6
    workers: int = 1


def _violates_both(p) -> bool:
    return not (p[0] < 0 < p[1]) and not (p[1] < 0 < p[2])


def sample_states(cfg: ScanConfig) -> list[PeakonState]:
    """Draw ``cfg.samples`` states; with ``excluded_only`` keep n=3 states meeting neither collision condition."""
    rng = np.random.default_rng(cfg.seed)
    out = []
    while len(out) < cfg.samples:
        gaps = rng.uniform(*cfg.gap_range, size=cfg.n - 1)
        q = np.concatenate([[0.0], -np.cumsum(gaps)]) + np.sum(gaps)
        mags = rng.uniform(*cfg.momentum_range, size=cfg.n)
        signs = rng.choice([-1.0, 1.0], size=cfg.n)
        p = mags * signs
        if cfg.excluded_only and cfg.n == 3 and not _violates_both(p):
            continue
        out.append(PeakonState(q, p))
    return out


def evaluate_state(state: PeakonState, cfg: ScanConfig) -> dict:
    verdict = predict(state)
    horizon = cfg.horizon
    if verdict.outcome is Outcome.COLLIDES:
        horizon = 2.0 * verdict.bound_time
    opts = IntegratorOptions(
        horizon=horizon, rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, gap_eps=cfg.gap_eps
    )
    traj = integrate(state, opts)
    collided = traj.status is Status.COLLISION_STOP
    t_obs = traj.events[0].t_hi if collided else None

    contradiction = False
    if verdict.outcome is Outcome.COLLIDES:
        contradiction = not collided or t_obs > verdict.bound_time + BOUND_SLACK
    elif verdict.outcome is Outcome.ESCAPES:
        contradiction = collided
    row = {f"q{i + 1}": float(x) for i, x in enumerate(state.q)}
    row.update({f"p{i + 1}": float(x) for i, x in enumerate(state.p)})
    row.update(
        predicted=verdict.outcome.value,
        condition_fired=verdict.condition_fired or "",
        bound_time=verdict.bound_time,
        horizon=horizon,
        observed=traj.status.value,
        collision_time=t_obs,
        pair="-".join(map(str, traj.events[0].pair)) if collided else "",
        contradiction=contradiction,
        failed=traj.status is Status.STEP_FAILURE,
    )
    return row


def _evaluate(args):
    return evaluate_state(*args)


def run_scan(cfg: ScanConfig) -> list[dict]:
    states = sample_states(cfg)
    jobs = [(s, cfg) for s in states]
    workers = cfg.workers or os.cpu_count() or 1
    if workers <= 1:
        return [_evaluate(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(
            {
                k: ("" if v is None else format(v, ".17g") if isinstance(v, float) else v)
                for k, v in row.items()
            }
        )
    return buf.getvalue()
