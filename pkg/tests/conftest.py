import random

import pytest
from hypothesis import HealthCheck, settings

from mddw.algebra import get_group

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def toy():
    return get_group("toy23")


@pytest.fixture(scope="session")
def g16():
    return get_group("test16")


@pytest.fixture(scope="session")
def prod():
    return get_group("prod128")


@pytest.fixture
def rng():
    return random.Random(1234)
