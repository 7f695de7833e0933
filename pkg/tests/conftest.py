import numpy as np
import pytest

from fucikwave.spectral import TruncationSpec

# Lines recorded by the acceptance suite, echoed in the terminal summary.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def small_trunc():
    return TruncationSpec.from_bounds(4, 3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
