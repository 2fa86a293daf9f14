import sys

import numpy as np
import pytest

from he3light.constants import GHZ, CellParams
from he3light.polarizability import coupling_closed_form


@pytest.fixture
def cell():
    return CellParams.from_ratio(1e3)


@pytest.fixture
def couplings_c1(cell):
    return coupling_closed_form(-2 * GHZ, cell=cell)


@pytest.fixture
def couplings_c2(cell):
    return coupling_closed_form(-31 * GHZ, cell=cell)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n].line())
