import numpy as np
import pytest

from nslp.lp_core import LpInstance, augment_nonnegativity

_ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key}: {detail}")


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the test still asserts on its own."""

    def record(name, ok, detail=""):
        _ACCEPTANCE[name] = (bool(ok), detail)
        print(f"{name}: {'PASS' if ok else 'FAIL'} {detail}")

    return record


@pytest.fixture
def unit_box():
    """{x <= 1, y <= 1, x, y >= 0} with the sign rows appended (m = 4)."""
    return augment_nonnegativity(LpInstance([[1, 0], [0, 1]], [1, 1], [1, 1]))


@pytest.fixture
def simplex2():
    return augment_nonnegativity(LpInstance([[1, 1]], [1], [2, 1]))

