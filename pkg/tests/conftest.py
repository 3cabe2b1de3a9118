import numpy as np
import pytest

from scramble.accessible import OptimizerSettings


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def settings():
    return OptimizerSettings()
