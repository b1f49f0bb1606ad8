import random

import pytest
from hypothesis import HealthCheck, settings

SEED = 20240611

settings.register_profile(
    "fixed",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("fixed")


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=SEED, help=f"seed for randomized sampling (default {SEED})")


@pytest.fixture
def rng(request):
    return random.Random(request.config.getoption("--seed"))
