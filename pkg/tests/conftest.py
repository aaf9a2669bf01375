import numpy as np
import pytest

from ddgd import digraph, objective

ACCEPTANCE_LINES = []


def record_acceptance(number: int, ok: bool, detail: str):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def g6():
    return digraph.random_strongly_connected(6, 0.3, seed=0)


@pytest.fixture
def ls6():
    return objective.generate_least_squares(6, seed=0)
