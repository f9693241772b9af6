import numpy as np
import pytest

from todakit.curve import build_curve


def random_curve(rng, g, lo=0.3, hi=1.5):
    """Curve with random band/gap lengths in [lo, hi] beyond [0, 1]."""
    pts = 1.0 + np.cumsum(rng.uniform(lo, hi, size=2 * g))
    return build_curve(g, pts[0::2], pts[1::2])


@pytest.fixture
def g1():
    return build_curve(1, [2.0], [3.0])


@pytest.fixture
def g2():
    return build_curve(2, [2.0, 4.0], [3.0, 5.5])


@pytest.fixture
def g3():
    return build_curve(3, [1.8, 3.4, 5.1], [2.6, 4.3, 6.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)
