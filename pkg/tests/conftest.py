import numpy as np
import pytest

from comptest import TwoSampleClr

_ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def small_pair(rng):
    x = rng.normal(size=(7, 5))
    y = rng.normal(size=(6, 5)) + 0.3
    return TwoSampleClr(x, y)


@pytest.fixture(scope="session")
def acceptance_log():
    """Collects one PASS/FAIL line per acceptance criterion."""
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
