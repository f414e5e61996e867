"""
shared process fixtures
"""
import pytest

from levycap.levy_model import LevyTriplet
from levycap.measure_energy import DiscreteMeasure


@pytest.fixture
def brownian():
    return LevyTriplet.brownian()


@pytest.fixture
def poisson():
    return LevyTriplet.poisson(1.0)


@pytest.fixture
def drift():
    return LevyTriplet.drift(1.0)


@pytest.fixture
def compound_poisson():
    return LevyTriplet.symmetric_compound_poisson(1.0, 1.0)


@pytest.fixture
def cauchy():
    return LevyTriplet.stable_process(1.0, 1.0)


@pytest.fixture
def two_points():
    return DiscreteMeasure([0.0, 1.0], [0.5, 0.5])
