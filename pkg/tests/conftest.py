import numpy as np
import pytest
from hypothesis import settings

from anisocga.seeding import CellStream


@pytest.fixture
def stream():
    return CellStream(12345)


@pytest.fixture
def np_rng():
    return np.random.default_rng(2024)

# first calls into numba kernels include compilation time
settings.register_profile("anisocga", deadline=None, max_examples=60)
settings.load_profile("anisocga")


# acceptance verdicts, one line each in the terminal summary
ACCEPTANCE = {}


@pytest.fixture
def verdict():
    def record(criterion, passed, detail):
        ACCEPTANCE[criterion] = (bool(passed), detail)
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[criterion]
        terminalreporter.write_line(f"criterion {criterion:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
