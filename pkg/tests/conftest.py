import numpy as np
import pytest

from fermbezzle.covariance import Covariance
from fermbezzle.linalg import haar_unitary

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_cov(rng, n, low=0.0, high=1.0):
    return Covariance.from_eigh(rng.uniform(low, high, n), haar_unitary(n, rng))
