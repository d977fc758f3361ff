import numpy as np
import pytest

from fraccauchy.measures import SubordinatorSpec
from fraccauchy.rng import stream


@pytest.fixture
def half():
    """Single atom beta = 1/2 with mu weight 1, so psi(s) = sqrt(s)."""
    return SubordinatorSpec.from_mu_weights([(0.5, 1.0)])


@pytest.fixture
def two_term():
    return SubordinatorSpec.two_term(1.0, 0.4, 1.0, 0.8)


@pytest.fixture
def gen():
    return stream(12345, "tests")


def mc_within(sample_mean, stderr, target, k=3.0):
    return abs(sample_mean - target) <= k * stderr


np.seterr(all="ignore")


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
