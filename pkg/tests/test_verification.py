import pytest

from peakon import geometry, verification
from peakon.geometry import RiemannComponents3D


def test_default_run_passes():
    results = verification.run_verification()
    assert [r.name for r in results] == list(verification.SUITES)
    failing = [(r.name, r.detail) for r in results if not r.passed]
    assert not failing
    assert sum(r.seconds for r in results) < 60


def test_only_filter():
    (res,) = verification.run_verification(only=["hhat"])
    assert res.name == "hhat" and res.passed


def test_unknown_suite():
    with pytest.raises(KeyError):
        verification.run_verification(only=["nope"])


def flipped_r1213(original):
    def patched(q):
        R = original(q)
        return RiemannComponents3D(R.r1212, R.r2323, R.r1313, -R.r1213, R.r1223, R.r1323)

    return patched


def test_sign_flip_is_caught(monkeypatch):
    monkeypatch.setattr(geometry, "riemann_3d", flipped_r1213(geometry.riemann_3d))
    (res,) = verification.run_verification(only=["riemann"])
    assert not res.passed
