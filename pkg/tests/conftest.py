import pytest

import _fixtures
from _acceptance_log import RESULTS


@pytest.fixture
def three_node():
    return _fixtures.three_node_dsf()


@pytest.fixture
def three_node_m_eff():
    return _fixtures.three_node_effective_iqp()


@pytest.fixture
def ring():
    return _fixtures.ring_system()


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        ok, detail = RESULTS[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
