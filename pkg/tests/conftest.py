import numpy as np
import pytest

from beamsweep import ArrayGeometry, BeamformingWeights, RadioConfig


@pytest.fixture(scope="session")
def geom8():
    return ArrayGeometry.uniform_linear(8, 8)


@pytest.fixture(scope="session")
def ones8(geom8):
    return BeamformingWeights.all_ones(geom8)


@pytest.fixture(scope="session")
def radio():
    return RadioConfig()


@pytest.fixture()
def rng():
    return np.random.default_rng(20260816)
