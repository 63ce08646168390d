import numpy as np
import pytest

from arflow import ReferenceProfile


@pytest.fixture
def uniform_profile():
    """Density 1 on [0, 1], mass 1."""
    return ReferenceProfile([0.0, 1.0], [1.0])


@pytest.fixture
def dense2_profile():
    """Density 2 on [0, 1], mass 2."""
    return ReferenceProfile([0.0, 1.0], [2.0])


@pytest.fixture
def half_profile():
    """Density 1/2 on [0, 1], mass 1/2."""
    return ReferenceProfile([0.0, 1.0], [0.5])


@pytest.fixture
def gap_profile():
    """Density 1 on [0, 1] and [2, 3], zero in between, mass 2."""
    return ReferenceProfile([0.0, 1.0, 2.0, 3.0], [1.0, 0.0, 1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
