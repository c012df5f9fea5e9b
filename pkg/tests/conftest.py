import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from jacobispec.coefficients import CoefficientSequence, family_preset  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def hermite():
    return family_preset("hermite")


@pytest.fixture
def chebyshev():
    return family_preset("constant", a=0.0, b=0.5)


@pytest.fixture
def paired():
    return family_preset("paired", ratio=2.0)


@pytest.fixture
def quadratic():
    return CoefficientSequence.from_closure(lambda k: (float((k + 1) ** 2), float(k + 1)))
