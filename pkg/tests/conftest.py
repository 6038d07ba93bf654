"""Shared test configuration.

Hypothesis runs derandomized so the suite is deterministic and headless;
deadlines are disabled because several properties evaluate grid quantities
whose first call pays numpy warm-up costs.
"""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from synthflux.field import FieldParams

settings.register_profile(
    "default",
    deadline=None,
    max_examples=50,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def defaults() -> FieldParams:
    return FieldParams()


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
