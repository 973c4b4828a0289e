import numpy as np
import pytest

from levelset import FourierSupport, random_curve, sample_curve


@pytest.fixture(scope="session")
def curve_3x3():
    """One fixed random curve with a 3x3 support, shared across tests."""
    return random_curve(FourierSupport.rect(3, 3), seed=123)


@pytest.fixture(scope="session")
def cloud_61(curve_3x3):
    """61 points on the session curve (enough for a 5x5 recovery support)."""
    return sample_curve(curve_3x3, 61)


@pytest.fixture(scope="session")
def cloud_40(curve_3x3):
    return sample_curve(curve_3x3, 40)


@pytest.fixture()
def rng():
    return np.random.default_rng(42)
