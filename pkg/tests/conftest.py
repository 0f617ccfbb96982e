import numpy as np
import pytest

from slicepi.geometry import BoundaryGrid


@pytest.fixture(scope="session")
def grid():
    """The default desk-scale grid."""
    return BoundaryGrid.build()


@pytest.fixture(scope="session")
def small_grid():
    return BoundaryGrid.build(12, 16, 32)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
