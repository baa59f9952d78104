import pytest

from schroflow import (ModeIndex, RadialQuadrature, build_table,
                       constant_a_spectrum, make_mode)


@pytest.fixture(scope="session")
def quad_default():
    return RadialQuadrature()


@pytest.fixture(scope="session")
def table_loss():
    """N=3, constant a=-0.1875: the loss-of-decay witness problem."""
    eigsys = constant_a_spectrum(3, -0.1875, 12)
    return build_table(eigsys, 3, len(eigsys))


@pytest.fixture(scope="session")
def table_free():
    eigsys = constant_a_spectrum(3, 0.0, 12)
    return build_table(eigsys, 3, len(eigsys))


@pytest.fixture(scope="session")
def mode01_loss(table_loss):
    return make_mode(ModeIndex(0, 1), table_loss)


@pytest.fixture(scope="session")
def mode01_free(table_free):
    return make_mode(ModeIndex(0, 1), table_free)
