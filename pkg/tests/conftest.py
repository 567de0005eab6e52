import numpy as np
import pytest


def random_q(rng, n, lo=0.2, hi=3.0):
    """Positions with adjacent gaps uniform in [lo, hi], q1 drawn near 0."""
    gaps = rng.uniform(lo, hi, size=n - 1)
    return rng.uniform(-1.0, 1.0) - np.concatenate([[0.0], np.cumsum(gaps)])


def random_p(rng, n, lo=0.2, hi=2.0):
    return rng.uniform(lo, hi, size=n) * rng.choice([-1.0, 1.0], size=n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
