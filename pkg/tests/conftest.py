import math

import numpy as np
import pytest

from hypmetrics import kernels
from hypmetrics.geometry import Disc, HalfPlane, Interval, MappedDisc, unit_square


@pytest.fixture(scope="session")
def disc():
    return Disc()


@pytest.fixture(scope="session")
def half_plane():
    return HalfPlane((1.0, 0.0), 0.0)


@pytest.fixture(scope="session")
def square():
    return unit_square()


@pytest.fixture(scope="session")
def interval():
    return Interval(0.0, 1.0)


@pytest.fixture(scope="session")
def npt_domain():
    return MappedDisc("npt_example")


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture(params=kernels.available())
def backend(request):
    before = kernels.BACKEND
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(before)


LOG2 = math.log(2.0)
