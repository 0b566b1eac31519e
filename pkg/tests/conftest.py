import numpy as np
import pytest
from hypothesis import settings

from kinklab.grid import Grid

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid():
    return Grid(80.0, 1024)


@pytest.fixture(scope="session")
def fine_grid():
    return Grid(80.0, 4096)


def bump(x, c=0.0, w=2.0):
    return np.exp(-((x - c) / w) ** 2)


ACCEPTANCE_LINES = []


def report(number: int, passed: bool, detail: str) -> bool:
    """Record one acceptance verdict; printed in the terminal summary."""
    ACCEPTANCE_LINES.append(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
