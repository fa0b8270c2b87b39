import numpy as np
import pytest

from locred.decomposition import build_decomposition, build_pu, theory_constants
from locred.fem import CoefficientField, SourceField, build_mesh, discretize


def channel_kappa(n_squares: int, contrast: float = 100.0) -> CoefficientField:
    """One horizontal high conductivity strip through the middle of the domain."""
    values = np.ones((n_squares, n_squares))
    values[n_squares // 2 - 1:n_squares // 2 + 1, 1:-1] = contrast
    return CoefficientField(values.ravel())


@pytest.fixture(scope="session")
def mesh4():
    return build_mesh(4)


@pytest.fixture(scope="session")
def mesh16():
    return build_mesh(16)


@pytest.fixture(scope="session")
def poisson16(mesh16):
    """kappa = 1, f = 1 on 16 x 16 squares."""
    return discretize(mesh16, CoefficientField.constant(16), SourceField.constant(16, 1.0))


@pytest.fixture(scope="session")
def channel16(mesh16):
    return discretize(mesh16, channel_kappa(16), SourceField.constant(16, 1.0))


@pytest.fixture(scope="session")
def dd16(mesh16):
    """3 x 3 boxes of side 0.5 shifted by 0.25."""
    return build_decomposition(mesh16, 0.5, 0.25)


@pytest.fixture(scope="session")
def pu16(dd16, mesh16):
    return build_pu(dd16, mesh16)


@pytest.fixture(scope="session")
def theory16(dd16, pu16, poisson16):
    return theory_constants(dd16, pu16, poisson16.kappa)


@pytest.fixture(scope="session")
def channel_theory16(dd16, pu16, channel16):
    return theory_constants(dd16, pu16, channel16.kappa)


@pytest.fixture(scope="session")
def contrast16(mesh16):
    """The channel at contrast 1e5."""
    return discretize(mesh16, channel_kappa(16, 1e5), SourceField.constant(16, 1.0))
