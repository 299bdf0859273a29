import numpy as np
import pytest

from mbmlt.chaos import GaussianBump, TestFunction
from mbmlt.specfun import HurstFunctional


@pytest.fixture(scope="session")
def h_const_07():
    return HurstFunctional.constant(0.7)


@pytest.fixture(scope="session")
def h_const_06():
    return HurstFunctional.constant(0.6)


@pytest.fixture(scope="session")
def h_linear():
    """h(t) = 0.55 + 0.2 t on [0, 1]."""
    return HurstFunctional.linear(0.55, 0.2)


@pytest.fixture(scope="session")
def phi_1d():
    return TestFunction((GaussianBump(0.5, 0.2, 0.8),))


@pytest.fixture(scope="session")
def phi_2d():
    return TestFunction((GaussianBump(0.6, 0.0, 1.0), GaussianBump(0.4, 0.5, 0.7)))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260823)
