import numpy as np
import pytest

from muckenhoupt import FiniteMetricMeasureSpace, generate


@pytest.fixture
def two_point():
    return FiniteMetricMeasureSpace([[0.0, 1.0], [1.0, 0.0]], [1.0, 1.0])


@pytest.fixture
def grid64():
    return generate("grid1d", n=64)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
