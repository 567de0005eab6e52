import numpy as np
import pytest

from peakon import io as pio
from peakon.core import PeakonState
from peakon.integrator import IntegratorOptions, Status, integrate


def assert_same(a, b):
    for name in ("t", "q", "p"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    assert a.status is b.status
    assert a.events == b.events
    assert set(a.invariants) == set(b.invariants)
    for k in a.invariants:
        assert np.array_equal(a.invariants[k], b.invariants[k])


@pytest.fixture(params=["collide2", "escape3"])
def trajectory(request):
    if request.param == "collide2":
        return integrate(PeakonState([1.0, 0.0], [-1.0, 1.0]))
    return integrate(PeakonState([1.0, 0.0, -1.0], [1.0, 0.5, 0.25]), IntegratorOptions(horizon=3.0))


def test_header():
    assert pio.trajectory_header(2) == ["t", "q1", "q2", "p1", "p2", "H0", "H1"]
    assert pio.trajectory_header(3)[-1] == "H2"


def test_csv_round_trip_is_exact(trajectory):
    text = pio.trajectory_to_csv(trajectory)
    assert_same(pio.trajectory_from_csv(text), trajectory)
    assert pio.trajectory_to_csv(pio.trajectory_from_csv(text)) == text


def test_json_round_trip_is_exact(trajectory):
    assert_same(pio.trajectory_from_json(pio.trajectory_to_json(trajectory)), trajectory)


def test_csv_comment_lines():
    traj = integrate(PeakonState([1.0, 0.0], [-1.0, 1.0]))
    lines = pio.trajectory_to_csv(traj).splitlines()
    assert lines[0] == "t,q1,q2,p1,p2,H0,H1"
    assert lines[-2] == "# status CollisionStop"
    assert lines[-1].startswith("# event ") and " 1-2 " in lines[-1]


@pytest.mark.parametrize("fmt_name", ["csv", "json"])
def test_files(tmp_path, trajectory, fmt_name):
    path = tmp_path / f"traj.{fmt_name}"
    pio.write_trajectory(trajectory, path, fmt_name)
    assert_same(pio.read_trajectory(path), trajectory)


def test_unknown_format(tmp_path, trajectory):
    with pytest.raises(ValueError):
        pio.write_trajectory(trajectory, tmp_path / "x", "xml")


def test_status_default_when_missing():
    traj = pio.trajectory_from_csv("t,q1,p1,H0,H1\n0,0,1,1,0.5\n")
    assert traj.status is Status.REACHED_HORIZON and traj.n == 1
