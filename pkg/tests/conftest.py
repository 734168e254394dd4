from pathlib import Path

import numpy as np
import pytest

PROBLEMS = Path(__file__).resolve().parents[1] / "problems"


@pytest.fixture
def rng():
    return np.random.default_rng(20121015)


@pytest.fixture
def problems_dir():
    return PROBLEMS


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
