import random

import pytest

from padic_potts import ModelParams

ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, label: str, passed: bool, detail: str = "") -> bool:
    status = "PASS" if passed else "FAIL"
    line = f"criterion {criterion:>2} [{status}] {label}"
    if detail:
        line += f" -- {detail}"
    ACCEPTANCE_LINES.append(line)
    return passed


@pytest.fixture
def acceptance():
    return record


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def strong():
    return ModelParams(5, 5, 3)


@pytest.fixture(scope="session")
def antiferro():
    return ModelParams(3, 1, -2)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
        terminalreporter.write_line(line)
