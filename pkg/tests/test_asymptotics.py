import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

from conftest import make_measure
from szego_lab.asymptotics import (ConstructionError, HardyClassError, blaschke_boundary,
                                   blaschke_derivative_at_zero, blaschke_eval, build_qn,
                                   compact_decay_bound, corollary_report, default_amplitude,
                                   modified_outer, predicted_exterior_limit,
                                   predicted_tau_limit, qn_diagnostics,
                                   qn_value_at_zero_of_F, residue_upper_bound, szego_outer,
                                   tail_series, tau_table)
from szego_lab.circle import NearCircleError
from szego_lab.measure import SzegoWeight
from szego_lab.ortho import orthonormal_set


def _bs_weight(grid):
    return SzegoWeight.from_declaration({"kind": "poly-modulus", "factors": [[0.5, 0, 1]]}, grid)


def test_blaschke_examples(grid):
    assert blaschke_eval([], 0.3) == 1
    assert blaschke_eval([2.0], math.inf) == pytest.approx(0.5)
    assert blaschke_eval([2.0], 3.0) == pytest.approx(0.2)
    assert blaschke_eval([2.0, 1.5j], 1.5j) == 0
    with pytest.raises(ZeroDivisionError):
        blaschke_eval([2.0], 0.5)


def test_blaschke_unimodular_on_circle(grid):
    B = blaschke_boundary([2.0, 1.3 - 0.4j, -2.5j], grid)
    assert np.max(np.abs(np.abs(B.values) - 1)) < 1e-10


def test_blaschke_derivative_matches_difference(grid):
    zeros = [2.0, 1.3 - 0.4j]
    for k, zk in enumerate(zeros):
        h = 1e-6
        fd = (blaschke_eval(zeros, zk + h) - blaschke_eval(zeros, zk - h)) / (2 * h)
        assert blaschke_derivative_at_zero(zeros, k) == pytest.approx(fd, rel=1e-8)


def test_predicted_tau_limit_examples(grid):
    assert predicted_tau_limit(make_measure(grid)) == pytest.approx(1.0)
    assert predicted_tau_limit(make_measure(grid, exterior=[(2.0, 1.0)])) == pytest.approx(0.5)
    mu = make_measure(grid, _bs_weight(grid), [(0.3, 0.5), (-0.2j, 1.0)], [(2.0, 1.0)])
    assert predicted_tau_limit(mu) == pytest.approx(0.5, abs=1e-14)
    # equals psi(inf) B(inf)
    psi = szego_outer(mu.weight)
    assert predicted_tau_limit(mu) == pytest.approx(
        psi.value_at_center * blaschke_eval([2.0], math.inf), abs=1e-10)


def test_predicted_exterior_limit_examples(grid):
    assert predicted_exterior_limit(make_measure(grid), 3.0) == pytest.approx(1.0)
    mu = make_measure(grid, exterior=[(2.0, 1.0)])
    assert predicted_exterior_limit(mu, 3.0) == pytest.approx(0.2)
    mu = make_measure(grid, SzegoWeight.constant(4.0, grid))
    assert predicted_exterior_limit(mu, 3.0) == pytest.approx(0.5)
    with pytest.raises(NearCircleError):
        predicted_exterior_limit(mu, 1.001)


def test_residue_bound_unperturbed(grid):
    mu = make_measure(grid)
    ops = orthonormal_set(mu, 10)
    for n in (0, 3, 10):
        rb = residue_upper_bound(mu, ops, n)
        assert rb.bound == pytest.approx(1.0) and rb.tau == 1.0
        assert rb.defect < 1e-10


def test_residue_bound_by_hand(grid):
    mu = make_measure(grid, exterior=[(2.0, 1.0)])
    ops = orthonormal_set(mu, 1)
    rb = residue_upper_bound(mu, ops, 1, ell=1)
    # p_1 = (z - 1)/sqrt3, psi = 1, B'(2) = 3/9
    corr = ((2 - 1) / math.sqrt(3) / 4) / (1 / 3)
    assert rb.correction == pytest.approx(corr)
    assert rb.bound == pytest.approx(0.5 * (1 + corr))
    assert rb.tau == pytest.approx(1 / math.sqrt(3))
    assert rb.ok and rb.defect < 1e-12


def test_residue_bound_ell_range(grid):
    mu = make_measure(grid, exterior=[(2.0, 1.0)])
    ops = orthonormal_set(mu, 2)
    with pytest.raises(ValueError):
        residue_upper_bound(mu, ops, 1, ell=2)
    rows = tau_table(mu, ops)
    assert [r["n"] for r in rows] == [0, 1, 2] and all(r["bound_ok"] for r in rows)


def test_corollary_unperturbed_and_constant(grid):
    mu = make_measure(grid)
    rows = corollary_report(mu, orthonormal_set(mu, 6), [3.0, 2j])
    assert all(r["boundary_defect"] < 1e-28 and r["error_0"] < 1e-15 for r in rows)
    mu = make_measure(grid, SzegoWeight.constant(4.0, grid))
    rows = corollary_report(mu, orthonormal_set(mu, 6), [3.0])
    # p_n = z^n / 2
    assert all(abs(r["error_0"]) < 1e-14 for r in rows)


def test_corollary_error_decreases(grid):
    mu = make_measure(grid, exterior=[(2.0, 1.0)])
    rows = corollary_report(mu, orthonormal_set(mu, 20), [3.0])
    errs = [r["error_0"] for r in rows[1:12]]
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_modified_outer_examples(grid):
    one = grid.constant(1.0)
    w = SzegoWeight.constant(1.0, grid)
    assert modified_outer(w, one, 0.25).value_at_center == pytest.approx(0.5)
    psit = modified_outer(w, one, 0.25)
    np.testing.assert_allclose(np.abs(psit.boundary_values().values), 0.5, rtol=1e-14)
    for A, expect in ((0.25, 0.5), (1.0, 1.0), (4.0, 1.0)):
        assert modified_outer(w, one, A).value_at_center == pytest.approx(expect)
    # A/V >= 1/w everywhere gives psi back
    bs = _bs_weight(grid)
    psi = szego_outer(bs)
    psit = modified_outer(bs, one, 100.0)
    assert psit(3.0) == pytest.approx(psi(3.0), abs=1e-14)
    with pytest.raises(ValueError):
        modified_outer(w, one, 0.0)


def test_default_amplitude(grid):
    w = SzegoWeight.constant(1.0, grid)
    assert default_amplitude(w, grid.constant(1.0)) == 1.0
    A = default_amplitude(w, grid.sample(lambda t: 1.5 + np.cos(t)))
    psi_t = modified_outer(w, grid.sample(lambda t: 1.5 + np.cos(t)), A).value_at_center
    psi_half = modified_outer(w, grid.sample(lambda t: 1.5 + np.cos(t)), A / 2).value_at_center
    assert psi_t >= 1 - 1e-3 and psi_half < 1 - 1e-3


def test_tail_series_examples(grid):
    t = tail_series(grid.constant(1.0), 4)
    np.testing.assert_allclose(t.coefficients, [1, 0, 0, 0, 0], atol=1e-15)
    assert t.residual < 1e-15
    t = tail_series(grid.function(np.conj(grid.points)), 3)
    np.testing.assert_allclose(t.coefficients, [0, 1, 0, 0], atol=1e-15)
    with pytest.raises(HardyClassError):
        tail_series(grid.function(grid.points), 3)


def test_tail_series_against_symbolic_expansion(grid):
    u = sympy.symbols("u")
    # F(z) = (z - 2)/(2z - 1) with z = 1/u
    series = sympy.series((1 - 2 * u) / (2 - u), u, 0, 12).removeO()
    exact = [float(series.coeff(u, j)) for j in range(12)]
    z = grid.points
    t = tail_series(grid.function((z - 2) / (2 * z - 1)), 11)
    np.testing.assert_allclose(t.coefficients.real, exact, atol=1e-14)
    assert exact[:4] == [0.5, -0.75, -0.375, -0.1875]
    assert tail_series(t.boundary).evaluate(3.0) == pytest.approx(0.2, abs=1e-12)


def test_build_qn_examples(grid):
    t = tail_series(grid.constant(1.0), 4)
    np.testing.assert_allclose(build_qn(t, 2), [0, 0, 1], atol=1e-15)
    z = grid.points
    t = tail_series(grid.function((z - 2) / (2 * z - 1)), 8)
    np.testing.assert_allclose(build_qn(t, 1), [-0.75, 0.5], atol=1e-14)
    for n in range(9):
        assert build_qn(t, n)[n] == t.coefficients[0]
    with pytest.raises(ValueError):
        build_qn(t, 9)


def test_qn_at_zero_of_F_exact(grid):
    # F = B_{(2)}: tau_j = -(3/2) 2^{-j} for j >= 1 so q_n(2) = 2^{-n-1}
    z = grid.points
    t = tail_series(grid.function((z - 2) / (2 * z - 1)))
    for n in (1, 5, 20, 40):
        exact = Fraction(1, 2) * 2 ** n - sum(Fraction(3, 2) * Fraction(1, 2 ** j) * 2 ** (n - j)
                                              for j in range(1, n + 1))
        assert exact == Fraction(1, 2 ** (n + 1))
        tail_form = qn_value_at_zero_of_F(t, n, 2.0)
        assert abs(tail_form - float(exact)) < 1e-16
        if n >= 20:
            # expanding the polynomial cancels terms of size 2^n
            poly_form = np.polyval(build_qn(t, n)[::-1], 2.0)
            assert abs(poly_form - float(exact)) > 100 * abs(tail_form - float(exact))


def test_qn_diagnostics_examples(grid):
    mu = make_measure(grid)
    diag = qn_diagnostics(mu, tail_series(grid.constant(1.0)), range(6))
    assert all(r["norm_sq"] == pytest.approx(1.0) for r in diag.rows)
    mu = make_measure(grid, interior=[(0.0, 1.0)], exterior=[(2.0, 1.0)])
    z = grid.points
    t = tail_series(grid.function((z - 2) / (2 * z - 1)))
    diag = qn_diagnostics(mu, t, range(1, 15))
    ext = [r["exterior"] for r in diag.rows]
    assert all(b < a for a, b in zip(ext, ext[1:]))
    for r in diag.rows:
        assert r["interior_sup"] == pytest.approx(abs(t.coefficients[r["n"]]), abs=1e-15)
    with pytest.raises(ConstructionError):
        qn_diagnostics(mu, tail_series(grid.constant(1.0)), range(3))


def test_compact_decay_bound(grid):
    z = grid.points
    t = tail_series(grid.function((z - 2) / (2 * z - 1)))
    r = 0.5
    ring = r * grid.points[::16]
    for n in (4, 16, 32):
        vals = np.polyval(t.coefficients[: n + 1], ring)
        assert np.max(np.abs(vals)) <= compact_decay_bound(t, n, r)
