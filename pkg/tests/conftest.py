import sys

import pytest

from geoscatter import THIN_LAYER, GaussianBump


@pytest.fixture
def thin():
    return THIN_LAYER


@pytest.fixture
def small_bump():
    return GaussianBump.from_eta(0.01, 1.0)



def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
