import numpy as np
import pytest

from land import _backend
from land.kernelmap import KernelConfig


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def cfg():
    return KernelConfig()


def _available_backends():
    names = ["python"]
    try:
        _backend.load("compiled")
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names


@pytest.fixture(params=_available_backends())
def backend(request):
    return _backend.load(request.param)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
