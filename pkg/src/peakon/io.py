"""Trajectory and report serialization.

CSV layout: header ``t,q1..qn,p1..pn,H0,H1[,H2]``, one row per sample,
reals written with 17 significant digits so they reparse bit-exactly.
Run metadata trails the rows as comment lines::

    # status CollisionStop
    # event <t_lo> <t_hi> <i>-<j> <x1>,<x2>,...
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .integrator import CollisionEvent, Status, Trajectory


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def trajectory_header(n: int) -> list[str]:
    cols = ["t"] + [f"q{i + 1}" for i in range(n)] + [f"p{i + 1}" for i in range(n)]
    cols += ["H0", "H1"]
    if n == 3:
        cols.append("H2")
    return cols


def trajectory_to_csv(traj: Trajectory) -> str:
    n = traj.n
    header = trajectory_header(n)
    inv_cols = header[1 + 2 * n :]
    lines = [",".join(header)]
    for k in range(len(traj)):
        row = [traj.t[k], *traj.q[k], *traj.p[k]] + [traj.invariants[c][k] for c in inv_cols]
        lines.append(",".join(fmt(x) for x in row))
    lines.append(f"# status {traj.status.value}")
    for ev in traj.events:
        point = ",".join(fmt(x) for x in ev.point)
        lines.append(f"# event {fmt(ev.t_lo)} {fmt(ev.t_hi)} {ev.pair[0]}-{ev.pair[1]} {point}")
    return "\n".join(lines) + "\n"


def trajectory_from_csv(text: str) -> Trajectory:
    rows = []
    events = []
    status = Status.REACHED_HORIZON
    header = None
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if parts[0] == "status":
                status = Status(parts[1])
            elif parts[0] == "event":
                i, j = (int(x) for x in parts[3].split("-"))
                point = tuple(float(x) for x in parts[4].split(",")) if len(parts) > 4 else ()
                events.append(CollisionEvent(float(parts[1]), float(parts[2]), (i, j), point))
            continue
        if header is None:
            header = line.split(",")
            continue
        rows.append([float(x) for x in line.split(",")])
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    n = sum(1 for c in header if c.startswith("q"))
    invariants = {c: data[:, idx] for idx, c in enumerate(header) if c.startswith("H")}
    return Trajectory(
        t=data[:, 0],
        q=data[:, 1 : 1 + n],
        p=data[:, 1 + n : 1 + 2 * n],
        events=tuple(events),
        status=status,
        invariants=invariants,
    )


def trajectory_to_dict(traj: Trajectory) -> dict:
    return {
        "n": traj.n,
        "status": traj.status.value,
        "t": traj.t.tolist(),
        "q": traj.q.tolist(),
        "p": traj.p.tolist(),
        "invariants": {k: np.asarray(v).tolist() for k, v in traj.invariants.items()},
        "events": [
            {"t_lo": e.t_lo, "t_hi": e.t_hi, "pair": list(e.pair), "point": list(e.point)}
            for e in traj.events
        ],
    }


def trajectory_from_dict(data: dict) -> Trajectory:
    n = int(data["n"])
    return Trajectory(
        t=np.array(data["t"], dtype=float),
        q=np.array(data["q"], dtype=float).reshape(-1, n),
        p=np.array(data["p"], dtype=float).reshape(-1, n),
        events=tuple(
            CollisionEvent(e["t_lo"], e["t_hi"], tuple(e["pair"]), tuple(e["point"]))
            for e in data["events"]
        ),
        status=Status(data["status"]),
        invariants={k: np.array(v, dtype=float) for k, v in data["invariants"].items()},
    )


def trajectory_to_json(traj: Trajectory) -> str:
    return json.dumps(trajectory_to_dict(traj))


def trajectory_from_json(text: str) -> Trajectory:
    return trajectory_from_dict(json.loads(text))


def write_trajectory(traj: Trajectory, path, fmt_name: str = "csv") -> None:
    path = Path(path)
    if fmt_name == "csv":
        path.write_text(trajectory_to_csv(traj))
    elif fmt_name == "json":
        path.write_text(trajectory_to_json(traj))
    else:
        raise ValueError(f"unknown format {fmt_name!r}")


def read_trajectory(path) -> Trajectory:
    path = Path(path)
    text = path.read_text()
    if text.lstrip().startswith("{"):
        return trajectory_from_json(text)
    return trajectory_from_csv(text)
