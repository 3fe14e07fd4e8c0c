import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gaussib.models import ar1_model, flat_model, halfband_model

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def flat():
    return flat_model()


@pytest.fixture(scope="session")
def ar1():
    return ar1_model()


@pytest.fixture(scope="session")
def halfband():
    return halfband_model()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
