import numpy as np
import pytest

from opschur._accel import HAS_NUMBA

ACCEPTANCE_LINES = []


def cgauss(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=[False, pytest.param(True, marks=pytest.mark.skipif(not HAS_NUMBA, reason="numba missing"))],
                ids=["numpy", "numba"])
def jit(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
