import numpy as np
import pytest

from jplab.disk2d import radial_grid
from jplab.potentials import potential_1d, radial_potential

BENCH_Z = complex(-2.0, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def bump():
    return radial_potential("gaussian", {"amp": -3.0, "width": 0.3}, R=1.0)


@pytest.fixture(scope="session")
def bump_grid(bump):
    return radial_grid(bump, 200)


@pytest.fixture(scope="session")
def disk_well():
    return radial_potential("square_well", {"v0": 5.0, "a": 0.5}, R=1.0)


@pytest.fixture(scope="session")
def disk_zero():
    return radial_potential("zero", R=1.0)


@pytest.fixture(scope="session")
def well():
    return potential_1d("square_well", {"v0": 2.0, "a": 1.5})


@pytest.fixture(scope="session")
def zero_1d():
    return potential_1d("zero", {"cutoff": 2.0})
