import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gtrs.generate import fixture_diagonal, fixture_e1, fixture_e1n, fixture_e2, fixture_gamma_empty

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES = []


@pytest.fixture
def e1():
    return fixture_e1()


@pytest.fixture
def e1n():
    return fixture_e1n()


@pytest.fixture
def e2():
    return fixture_e2()


@pytest.fixture
def d_half():
    return fixture_diagonal(0.5)


@pytest.fixture
def gamma_empty():
    return fixture_gamma_empty()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
