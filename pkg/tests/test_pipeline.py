import math

import pytest

from conftest import make_measure
from szego_lab.circle import UnitCircleGrid
from szego_lab.measure import InvalidMeasureError, SzegoWeight
from szego_lab.pipeline import run_chain


def test_chain_on_unperturbed_measure(grid):
    res = run_chain(make_measure(grid), 16)
    assert res.leading_exact()
    assert res.tail.coefficients[0] == pytest.approx(1.0)
    assert all(r["gap"] < 1e-12 for r in res.diagnostics.rows)


def test_chain_with_both_perturbations(grid):
    mu = make_measure(grid, interior=[(0.3, 0.5)], exterior=[(2.0, 1.0)])
    res = run_chain(mu, 48)
    s = res.summary()
    assert res.leading_exact()
    assert s["tau0"].real == pytest.approx(0.5, abs=1e-12)
    assert res.leading_gap < 1e-10
    last = res.diagnostics.rows[-1]
    assert last["exterior"] < 1e-20 and last["interior"] < 1e-20
    assert last["gap"] < 1e-10


@pytest.mark.parametrize("source", ["aggregate", "one"])
def test_alternative_v_sources(grid, source):
    mu = make_measure(grid, interior=[(0.3, 0.5)], exterior=[(2.0, 1.0)])
    res = run_chain(mu, 16, v_source=source)
    assert res.pair is None and res.leading_exact()


def test_kinked_modified_outer(grid):
    # a small amplitude truncates |psi~| so F has only finite smoothness
    w = {"kind": "exp-trig", "cos": [0.0, 0.8], "sin": [0.3]}
    mu = make_measure(grid, SzegoWeight.from_declaration(w, grid), [(0.5j, 1.0)], [(1.8, 0.7)])
    res = run_chain(mu, 32, amplitude=2.0)
    assert res.amplitude == 2.0 and res.tail.residual < 1e-6
    assert res.leading_exact() and res.leading_gap < 1e-10
    assert res.predicted_leading < math.exp(-0.5 * mu.weight.log_integral()) / 1.8


def test_chain_rejects_bad_input(grid):
    with pytest.raises(InvalidMeasureError):
        run_chain(make_measure(grid, exterior=[(0.5, 1.0)]), 8)
    with pytest.raises(ValueError):
        run_chain(make_measure(grid), 8, v_source="other")
    with pytest.raises(ValueError):
        run_chain(make_measure(UnitCircleGrid(64)), 40)
