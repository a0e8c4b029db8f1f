import numpy as np
import pytest

from oracles import ACCEPTANCE_LINES


@pytest.fixture
def rng():
    return np.random.default_rng(20231018)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
