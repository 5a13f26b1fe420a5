"""Pytest configuration and shared fixtures."""

import numpy as np
import pytest

from alphaz_fidelity.config import set_debug_checks
from alphaz_fidelity.fidelity import ParamPoint
from alphaz_fidelity.states import DensityMatrix, density_from_spectrum, haar_unitary, random_density


@pytest.fixture(autouse=True)
def reset_debug_checks():
    """Keep the process-wide form check off between tests."""
    set_debug_checks(False)
    yield
    set_debug_checks(False)


@pytest.fixture
def diag_rho():
    """diag(0.7, 0.3)."""
    return density_from_spectrum([0.7, 0.3])


@pytest.fixture
def diag_sigma():
    """diag(0.6, 0.4)."""
    return density_from_spectrum([0.6, 0.4])


@pytest.fixture
def rotated_sigma():
    """A state with spectrum (0.6, 0.4) in a Haar-random basis, not commuting with diag_rho."""
    return density_from_spectrum([0.6, 0.4], haar_unitary(2, 11))


@pytest.fixture
def random_pair():
    """Two full-rank d=3 states with every eigenvalue at least 0.05."""
    floor = 0.15 * np.eye(3) / 3
    rho = DensityMatrix.from_matrix(0.85 * random_density(3, seed=1).matrix + floor)
    sigma = DensityMatrix.from_matrix(0.85 * random_density(3, seed=2).matrix + floor)
    return rho, sigma


@pytest.fixture
def concave_point():
    """(alpha, z) = (0.5, 0.5): the Uhlmann point, in the concave region."""
    return ParamPoint.of(0.5, 0.5)


@pytest.fixture
def convex_point():
    """(alpha, z) = (2, 1.5), in the convex region with data processing."""
    return ParamPoint.of(2.0, 1.5)
