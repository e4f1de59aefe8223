import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ccsa import datasets  # noqa: E402


@pytest.fixture(scope="session")
def a900_1():
    return datasets.load("A_900_1")


@pytest.fixture(scope="session")
def u2_900_3():
    return datasets.load("U2_900_3")


@pytest.fixture(scope="session")
def primers(a900_1):
    return a900_1.primers


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
