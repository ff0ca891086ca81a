import numpy as np
import pytest
from hypothesis import settings

from kp5.grid import Grid2D

settings.register_profile("kp5", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("kp5")


@pytest.fixture
def small_grid():
    return Grid2D(16, 16, 8.0, 8.0)


@pytest.fixture
def grid32():
    return Grid2D(32, 32, 16.0, 16.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
