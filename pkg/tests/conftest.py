import numpy as np
import pytest

from plapsim import harness, kernels
from plapsim import _kernels_py

BACKENDS = [pytest.param(_kernels_py, id="python")]
if "cython" in kernels.available():
    BACKENDS.append(pytest.param(kernels.available()["cython"], id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def blowup_params():
    return harness.BLOWUP_TUPLE


@pytest.fixture
def global_params():
    return harness.GLOBAL_TUPLE


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
