"""Command-line front end: ``peakon {simulate,predict,curvature,scan,verify}``.

Exit codes: 0 ok, 1 verification failure, 2 invalid input,
3 runtime failure or a contradiction found by ``scan``.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io as pio
from .collision import predict
from .core import PeakonState
from .errors import PeakonError
from .geometry import curvature_report
from .integrator import IntegratorOptions, Status, integrate
from .invariants import invariant_drift
from .scan import ScanConfig, rows_to_csv, run_scan
from .verification import run_verification

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID = 2
EXIT_RUNTIME = 3

# options whose value may start with a minus sign, e.g. ``--p -1,1``
_VECTOR_FLAGS = ("--q", "--p", "--plane")

DEFAULTS = {
    "q": None,
    "p": None,
    "horizon": None,  # 10 for simulate, 50 for scan
    "rtol": 1e-10,
    "atol": 1e-12,
    "gap_eps": 1e-6,
    "sample_dt": None,
    "out": None,
    "format": "csv",
    "seed": 7,
    "samples": 200,
    "n": 2,
    "excluded_only": False,
    "workers": 1,
    "plane": None,
    "only": None,
}


class InputError(Exception):
    pass


def _floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"cannot parse number list {text!r}") from exc


def _glue_vector_args(argv):
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VECTOR_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default values for any flag")
    common.add_argument("--q", help="positions, comma separated, decreasing")
    common.add_argument("--p", help="momenta, comma separated")
    common.add_argument("--horizon", type=float)
    common.add_argument("--rtol", type=float)
    common.add_argument("--atol", type=float)
    common.add_argument("--gap-eps", dest="gap_eps", type=float)
    common.add_argument("--sample-dt", dest="sample_dt", type=float)
    common.add_argument("--out")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)

    parser = argparse.ArgumentParser(prog="peakon", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="integrate a peakon and write its trajectory")
    sub.add_parser("predict", parents=[common], help="collision verdict for a 2- or 3-peakon")
    curv = sub.add_parser("curvature", parents=[common], help="curvature report at a point")
    curv.add_argument("--plane", help="a1,a2,a3,b1,b2,b3 spanning a tangent plane (n=3)")
    scan = sub.add_parser("scan", parents=[common], help="random prediction-vs-simulation scan")
    scan.add_argument("--n", type=int)
    scan.add_argument("--excluded-only", dest="excluded_only", action="store_true", default=None)
    scan.add_argument("--workers", type=int)
    verify = sub.add_parser("verify", parents=[common], help="run the oracle suites")
    verify.add_argument("--only", help="comma-separated suite names")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Defaults, overridden by the config file, overridden by explicit flags."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if key not in cfg:
                raise InputError(f"unknown config key {key!r}")
            cfg[key] = value
    for key, value in vars(args).items():
        if key in cfg and value is not None:
            cfg[key] = value
    return cfg


def _state(cfg) -> PeakonState:
    if cfg["q"] is None or cfg["p"] is None:
        raise InputError("--q and --p are required")
    q, p = _floats(cfg["q"]), _floats(cfg["p"])
    if len(q) != len(p):
        raise InputError(f"--q has {len(q)} entries but --p has {len(p)}")
    return PeakonState(q, p)


def _options(cfg) -> IntegratorOptions:
    return IntegratorOptions(
        horizon=10.0 if cfg["horizon"] is None else float(cfg["horizon"]),
        rel_tol=float(cfg["rtol"]),
        abs_tol=float(cfg["atol"]),
        gap_eps=float(cfg["gap_eps"]),
        sample_dt=None if cfg["sample_dt"] is None else float(cfg["sample_dt"]),
    )


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_simulate(cfg) -> int:
    traj = integrate(_state(cfg), _options(cfg))
    if cfg["out"]:
        pio.write_trajectory(traj, cfg["out"], cfg["format"])
    final = traj.final_state
    _emit(
        {
            "status": traj.status.value,
            "n": traj.n,
            "samples": len(traj),
            "t_final": float(traj.t[-1]),
            "final": {"q": final.q.tolist(), "p": final.p.tolist()},
            "events": [
                {"t_lo": e.t_lo, "t_hi": e.t_hi, "pair": list(e.pair), "point": list(e.point)}
                for e in traj.events
            ],
            "drift": invariant_drift(traj).as_dict(),
        }
    )
    return EXIT_RUNTIME if traj.status is Status.STEP_FAILURE else EXIT_OK


def cmd_predict(cfg) -> int:
    _emit(predict(_state(cfg)).as_dict())
    return EXIT_OK


def cmd_curvature(cfg) -> int:
    if cfg["q"] is None:
        raise InputError("--q is required")
    plane = None
    if cfg["plane"] is not None:
        vals = _floats(cfg["plane"])
        if len(vals) != 6:
            raise InputError("--plane needs six numbers a1,a2,a3,b1,b2,b3")
        plane = (np.array(vals[:3]), np.array(vals[3:]))
    _emit(curvature_report(_floats(cfg["q"]), plane=plane).as_dict())
    return EXIT_OK


def cmd_scan(cfg) -> int:
    n = int(cfg["n"])
    if n not in (2, 3):
        raise InputError("--n must be 2 or 3")
    scan_cfg = ScanConfig(
        n=n,
        samples=int(cfg["samples"]),
        seed=int(cfg["seed"]),
        excluded_only=bool(cfg["excluded_only"]),
        horizon=50.0 if cfg["horizon"] is None else float(cfg["horizon"]),
        rel_tol=float(cfg["rtol"]),
        abs_tol=float(cfg["atol"]),
        gap_eps=float(cfg["gap_eps"]),
        workers=int(cfg["workers"]),
    )
    rows = run_scan(scan_cfg)
    text = rows_to_csv(rows)
    bad = sum(1 for r in rows if r["contradiction"] or r["failed"])
    summary = {
        "n": n,
        "samples": len(rows),
        "seed": scan_cfg.seed,
        "collisions": sum(1 for r in rows if r["observed"] == Status.COLLISION_STOP.value),
        "contradictions": sum(1 for r in rows if r["contradiction"]),
        "failures": sum(1 for r in rows if r["failed"]),
    }
    if cfg["out"]:
        Path(cfg["out"]).write_text(text)
        _emit(summary)
    else:
        sys.stdout.write(text)
        print(json.dumps(summary), file=sys.stderr)
    return EXIT_RUNTIME if bad else EXIT_OK


def cmd_verify(cfg) -> int:
    only = cfg["only"]
    if isinstance(only, str):
        only = [x.strip() for x in only.split(",") if x.strip()]
    try:
        results = run_verification(only=only, seed=int(cfg["seed"]))
    except KeyError as exc:
        raise InputError(str(exc)) from exc
    width = max(len(r.name) for r in results)
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {mark}  {r.seconds:6.2f}s  {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY_FAILED


COMMANDS = {
    "simulate": cmd_simulate,
    "predict": cmd_predict,
    "curvature": cmd_curvature,
    "scan": cmd_scan,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    argv = _glue_vector_args(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except (InputError, PeakonError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
