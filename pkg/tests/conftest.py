import numpy as np
import pytest

from szego_lab.circle import UnitCircleGrid
from szego_lab.measure import ExteriorMasses, InteriorAtoms, PerturbedMeasure, SzegoWeight

# acceptance criteria record their outcome here for the terminal summary
ACCEPTANCE_RESULTS: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance runs")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def grid():
    return UnitCircleGrid(4096)


@pytest.fixture(scope="session")
def small_grid():
    return UnitCircleGrid(256)


def make_measure(grid, weight=None, interior=(), exterior=()):
    w = weight if weight is not None else SzegoWeight.constant(1.0, grid)
    return PerturbedMeasure(w, InteriorAtoms(list(interior)), ExteriorMasses(list(exterior)))


@pytest.fixture
def rng():
    return np.random.default_rng(20241014)
