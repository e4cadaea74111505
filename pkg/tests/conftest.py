import numpy as np
import pytest

from agent_economy import Economy, is_irreducible

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_column_stochastic(rng, n, density=0.7):
    """Random column-stochastic matrix with roughly ``density`` of entries nonzero."""
    while True:
        P = rng.random((n, n)) * (rng.random((n, n)) < density)
        if np.all(P.sum(axis=0) > 0):
            return P / P.sum(axis=0)


def random_irreducible_economy(rng, n, density=0.7, utility_high=5.0):
    while True:
        P = random_column_stochastic(rng, n, density)
        e = Economy(P, rng.uniform(0.0, utility_high, (n, n)))
        if is_irreducible(e):
            return e


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
