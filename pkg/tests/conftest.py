import importlib

import pytest

from radonhgf import _kernels_py


def _compiled():
    try:
        return importlib.import_module("radonhgf._kernels")
    except ImportError:
        return None


KERNEL_IMPLS = [pytest.param(_kernels_py, id="python")]
if _compiled() is not None:
    KERNEL_IMPLS.append(pytest.param(_compiled(), id="cython"))


@pytest.fixture(params=KERNEL_IMPLS)
def kernel_impl(request):
    return request.param


CRITERIA_LINES = []


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA_LINES):
            terminalreporter.write_line(line)
