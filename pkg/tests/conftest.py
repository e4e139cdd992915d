import numpy as np
import pytest

from tentropy.dynamics import FiniteSystem
from tentropy.transfer import TransferOperator

_ACCEPTANCE_LINES = []


def random_operator(rng, max_points, zero_prob=0.0, log_range=2.0):
    n = int(rng.integers(1, max_points + 1))
    system = FiniteSystem(rng.integers(0, n, size=n))
    w = np.exp(rng.uniform(-log_range, log_range, size=n))
    if zero_prob:
        w[rng.random(n) < zero_prob] = 0.0
    return TransferOperator(system, w)


@pytest.fixture
def mixed():
    """alpha = [1,0,3,3], w = (1,1,1,2): 2-cycle {0,1}, fixed point 3, tail 2 -> 3."""
    return TransferOperator(FiniteSystem(np.array([1, 0, 3, 3])), np.array([1.0, 1.0, 1.0, 2.0]))


@pytest.fixture
def three_cycle():
    return TransferOperator(FiniteSystem(np.array([1, 2, 0])), np.full(3, np.e))


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
