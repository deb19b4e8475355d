"""
Limits of tau_n and p_n(z)/z^n, finite-n residue bounds, and the
constructive approximants q_n(z) = z^n S_n(z).

Results that the CLI tabulates are returned as lists of plain dicts, one per
row, so they serialize directly to CSV and JSON.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .circle import (BoundaryFunction, OuterFunction, UnitCircleGrid, analyze,
                     NEAR_CIRCLE_FACTOR, NearCircleError)
from .measure import PerturbedMeasure, SzegoWeight
from .ortho import OrthonormalSet, boundary_values, eval_scaled

POLE_TOLERANCE = 1e-12
HARDY_RESIDUAL_LIMIT = 1e-6
ZERO_TOLERANCE = 1e-6
TREND_TOLERANCE = 1e-3


class ConstructionError(ValueError):
    """F does not vanish at the exterior masses."""


class HardyClassError(ValueError):
    """Boundary data has positive-frequency content beyond roundoff."""


# -- Blaschke products -------------------------------------------------------

def _factor(zk: complex, z):
    c = np.conj(zk) / abs(zk)
    return c * (z - zk) / (z * np.conj(zk) - 1.0)


def blaschke_eval(zeros: Sequence[complex], z):
    """Finite Blaschke product with zeros outside the disk.

    ``z`` may be a scalar, an array, or ``math.inf`` (B(inf) = prod 1/|z_k|).
    """
    zeros = [complex(a) for a in zeros]
    if np.isscalar(z) and np.isinf(abs(z)):
        return float(np.prod([1.0 / abs(a) for a in zeros])) if zeros else 1.0
    za = np.asarray(z, dtype=complex)
    out = np.ones_like(za)
    for a in zeros:
        pole = 1.0 / np.conj(a)
        if np.any(np.abs(za - pole) < POLE_TOLERANCE):
            raise ZeroDivisionError(f"evaluation at the pole {pole} of B")
        out = out * _factor(a, za)
    return complex(out) if out.ndim == 0 else out


def blaschke_boundary(zeros: Sequence[complex], grid: UnitCircleGrid) -> BoundaryFunction:
    return BoundaryFunction(grid, blaschke_eval(zeros, grid.points) * np.ones(grid.size))


def blaschke_derivative_at_zero(zeros: Sequence[complex], k: int) -> complex:
    """B'(z_k) = factor'_k(z_k) * prod_{j != k} factor_j(z_k)."""
    zk = complex(zeros[k])
    d = (np.conj(zk) / abs(zk)) / (abs(zk) ** 2 - 1.0)
    for j, a in enumerate(zeros):
        if j != k:
            d *= _factor(complex(a), zk)
    return complex(d)


# -- predicted limits --------------------------------------------------------

def szego_outer(weight: SzegoWeight) -> OuterFunction:
    """Exterior outer psi with |psi|^2 = 1/w on the circle."""
    return OuterFunction(weight.samples.apply(lambda v: -0.5 * np.log(np.real(v))),
                         "exterior")


def predicted_tau_limit(mu: PerturbedMeasure) -> float:
    value = math.exp(-0.5 * mu.weight.log_integral())
    for z, _ in mu.exterior:
        value /= abs(z)
    return value


def _check_exterior_point(z, grid: UnitCircleGrid):
    if abs(z) - 1.0 < NEAR_CIRCLE_FACTOR / grid.size:
        raise NearCircleError(f"{z} is within {NEAR_CIRCLE_FACTOR}/N of the circle")


def predicted_exterior_limit(mu: PerturbedMeasure, z: complex,
                             psi: OuterFunction | None = None) -> complex:
    """(B psi)(z) for |z| > 1 + 10/N."""
    _check_exterior_point(z, mu.grid)
    psi = psi or szego_outer(mu.weight)
    return blaschke_eval(mu.exterior.locations, z) * psi(z)


# -- residue-theorem upper bound ---------------------------------------------

@dataclass(frozen=True)
class ResidueBound:
    n: int
    ell: int
    tau: float
    bound: float
    defect: float
    correction: complex

    @property
    def ok(self) -> bool:
        return self.tau <= self.bound + 1e-8


def residue_upper_bound(mu: PerturbedMeasure, ops: OrthonormalSet, n: int,
                        ell: int | None = None,
                        psi: OuterFunction | None = None) -> ResidueBound:
    """Finite-n upper bound on tau_n from the partial product B_ell.

    The integral of p_n / (z^n psi B_ell) over the circle is at most 1 in
    modulus and equals tau_n / (psi(inf) B_ell(inf)) minus the residue sum at
    z_1..z_ell; ``defect`` is the gap between its quadrature value and that
    residue formula.
    """
    zeros_all = list(mu.exterior.locations)
    if ell is None:
        ell = len(zeros_all)
    if not 0 <= ell <= len(zeros_all):
        raise ValueError(f"ell={ell} outside 0..{len(zeros_all)}")
    zeros = zeros_all[:ell]
    grid = mu.grid
    psi = psi or szego_outer(mu.weight)
    psi_inf = psi.value_at_center
    b_inf = blaschke_eval(zeros, math.inf)

    corr = 0j
    for k, zk in enumerate(zeros):
        scaled = eval_scaled(ops, n, zk) / zk          # p_n(z_k) / z_k^{n+1}
        corr += scaled / (psi(zk) * blaschke_derivative_at_zero(zeros, k))
    tau = float(ops.tau[n])
    bound = psi_inf * b_inf * (1.0 + abs(corr))

    pn = boundary_values(ops.coefficients[n], grid)
    integrand = pn * np.conj(grid.points) ** n / (
        psi.boundary_values().values * blaschke_boundary(zeros, grid).values)
    quad = complex(np.mean(integrand))
    residue_value = tau / (psi_inf * b_inf) - corr
    return ResidueBound(n, ell, tau, float(bound), abs(quad - residue_value), corr)


def tau_table(mu: PerturbedMeasure, ops: OrthonormalSet,
              ell: int | None = None) -> list[dict]:
    """One row per degree: tau_n, the predicted limit, the gap, and the
    residue bound with its quadrature defect."""
    psi = szego_outer(mu.weight)
    limit = predicted_tau_limit(mu)
    rows = []
    for n in range(ops.degree + 1):
        rb = residue_upper_bound(mu, ops, n, ell, psi)
        rows.append({
            "n": n,
            "tau": rb.tau,
            "predicted": limit,
            "gap": abs(rb.tau - limit),
            "bound": rb.bound,
            "defect": rb.defect,
            "bound_ok": rb.ok,
        })
    return rows


# -- Corollary diagnostics ---------------------------------------------------

def corollary_report(mu: PerturbedMeasure, ops: OrthonormalSet,
                     points: Sequence[complex],
                     ns: Iterable[int] | None = None) -> list[dict]:
    """Per n: boundary L^2 defect of B - p_n/(z^n psi) and pointwise errors
    |p_n(z)/z^n - (B psi)(z)| at each point."""
    grid = mu.grid
    for z in points:
        _check_exterior_point(z, grid)
    psi = szego_outer(mu.weight)
    zeros = mu.exterior.locations
    psi_b = psi.boundary_values().values
    b_b = blaschke_boundary(zeros, grid).values
    targets = [predicted_exterior_limit(mu, z, psi) for z in points]
    rows = []
    for n in (range(ops.degree + 1) if ns is None else ns):
        ratio = boundary_values(ops.coefficients[n], grid) * np.conj(grid.points) ** n / psi_b
        row = {"n": n, "boundary_defect": float(np.mean(np.abs(b_b - ratio) ** 2))}
        for i, (z, t) in enumerate(zip(points, targets)):
            row[f"error_{i}"] = abs(eval_scaled(ops, n, z) - t)
        rows.append(row)
    return rows


# -- constructive approximants -----------------------------------------------

def modified_outer(weight: SzegoWeight | BoundaryFunction, V: BoundaryFunction,
                   A: float) -> OuterFunction:
    """Exterior outer function with |psi~|^2 = min(1/w, A/V)."""
    if A <= 0:
        raise ValueError("A must be positive")
    w = weight.samples if isinstance(weight, SzegoWeight) else weight
    w = np.real(w.values)
    vals = np.minimum(1.0 / w, A / np.real(V.values))
    return OuterFunction(BoundaryFunction(V.grid, 0.5 * np.log(vals)), "exterior")


def default_amplitude(weight: SzegoWeight | BoundaryFunction, V: BoundaryFunction,
                      closeness: float = 1e-3) -> float:
    """Smallest power of two A with psi~(inf) >= (1 - closeness) psi(inf)."""
    w = weight.samples if isinstance(weight, SzegoWeight) else weight
    w = np.real(w.values)
    psi_inf = math.exp(-0.5 * float(np.mean(np.log(w))))
    vw = np.real(V.values) * w
    k = math.floor(math.log2(float(vw.min())))
    k_max = math.ceil(math.log2(float(vw.max())))
    while k < k_max:
        A = 2.0 ** k
        val = math.exp(0.5 * float(np.mean(np.log(np.minimum(1.0 / w, A / np.real(V.values))))))
        if val >= (1.0 - closeness) * psi_inf:
            return A
        k += 1
    return 2.0 ** k_max


@dataclass(frozen=True)
class TailSeries:
    """Coefficients tau_j of F(z) = sum_j tau_j z^{-j}, j = 0..J."""

    coefficients: np.ndarray
    residual: float
    boundary: BoundaryFunction

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def evaluate(self, z) -> complex:
        """F(z) = sum_{j<=J} tau_j z^{-j} for |z| > 1."""
        u = 1.0 / complex(z)
        acc = 0j
        for t in self.coefficients[::-1]:
            acc = acc * u + t
        return acc


def tail_series(F: BoundaryFunction, J: int | None = None) -> TailSeries:
    """Expansion at infinity read off the boundary spectrum: tau_j is the
    coefficient of e^{-ij theta}."""
    grid = F.grid
    half = grid.size // 2
    if J is None:
        J = half - 1
    if not 0 <= J < half:
        raise ValueError(f"J must lie in [0, {half})")
    spectrum = analyze(F)
    c = spectrum.coefficients
    tau = np.array([c[(-j) % grid.size] for j in range(J + 1)])
    residual = float(np.max(np.abs(c[1:J + 1]))) if J >= 1 else 0.0
    if residual > HARDY_RESIDUAL_LIMIT:
        raise HardyClassError(
            f"input not in exterior Hardy class at grid resolution "
            f"(positive-frequency residual {residual:.3e})"
        )
    tau.setflags(write=False)
    return TailSeries(tau, residual, F)


def build_qn(tail: TailSeries, n: int) -> np.ndarray:
    """Coefficients (lowest degree first) of q_n(z) = sum_{j<=n} tau_j z^{n-j}."""
    if not 0 <= n <= tail.order:
        raise ValueError(f"n={n} exceeds tail order {tail.order}")
    return np.array(tail.coefficients[: n + 1][::-1])


def partial_sum_boundary(tail: TailSeries, n: int) -> np.ndarray:
    """S_n on the grid."""
    grid = tail.boundary.grid
    spectrum = np.zeros(grid.size, dtype=complex)
    idx = (-np.arange(n + 1)) % grid.size
    spectrum[idx] = tail.coefficients[: n + 1]
    return np.fft.ifft(spectrum) * grid.size


def compact_decay_bound(tail: TailSeries, n: int, r: float) -> float:
    """Upper bound for |sum_{j<=n} tau_j z^{n-j}| over |z| <= r < 1."""
    t2 = np.abs(np.asarray(tail.coefficients)) ** 2
    total = math.sqrt(float(t2.sum()))
    far = math.sqrt(float(t2[np.arange(len(t2)) > n / 2].sum()))
    d = 1.0 - r * r
    return total * math.sqrt(r ** n / d) + far / math.sqrt(d)


def qn_value_inside(tail: TailSeries, n: int, z: complex) -> complex:
    acc = 0j
    for t in tail.coefficients[: n + 1]:
        acc = acc * z + t
    return acc


def qn_value_at_zero_of_F(tail: TailSeries, n: int, z: complex) -> complex:
    """q_n(z) at a point where F vanishes: -sum_{j>n} tau_j z^{n-j}.

    Summing the tail avoids the cancellation of O(|z|^n) terms in the
    polynomial form.
    """
    u = 1.0 / complex(z)
    acc = 0j
    for t in tail.coefficients[: n : -1]:
        acc = acc * u + t
    return -acc * u


@dataclass(frozen=True)
class QnDiagnostics:
    rows: list
    target: float
    trend_ok: bool


def qn_diagnostics(mu: PerturbedMeasure, tail: TailSeries,
                   ns: Iterable[int],
                   W: BoundaryFunction | None = None) -> QnDiagnostics:
    """Split ||q_n||^2 in L^2(mu) into its circle, exterior and interior
    parts and track convergence to int |F|^2 w dm."""
    w = np.real(mu.weight.samples.values)
    for z, _ in mu.exterior:
        if abs(tail.evaluate(z)) > ZERO_TOLERANCE:
            raise ConstructionError(
                f"F does not vanish at exterior mass {z} "
                f"(|F| = {abs(tail.evaluate(z)):.3e})"
            )
    F = tail.boundary.values
    target = float(np.mean(np.abs(F) ** 2 * w))
    rows = []
    for n in ns:
        S = partial_sum_boundary(tail, n)
        circle = float(np.mean(np.abs(S) ** 2 * w))
        ext = sum(m * abs(qn_value_at_zero_of_F(tail, n, z)) ** 2 for z, m in mu.exterior)
        inner_vals = [abs(qn_value_inside(tail, n, z)) for z, _ in mu.interior]
        inner = sum(m * v ** 2 for (_, m), v in zip(mu.interior, inner_vals))
        total = circle + ext + inner
        row = {
            "n": n,
            "leading": complex(build_qn(tail, n)[n]),
            "circle": circle,
            "exterior": float(ext),
            "interior": float(inner),
            "norm_sq": total,
            "target": target,
            "gap": abs(total - target),
            "interior_sup": max(inner_vals) if inner_vals else 0.0,
        }
        if W is not None:
            row["weighted_defect"] = float(np.mean(np.abs(S - F) ** 2 * np.real(W.values)))
        rows.append(row)
    return QnDiagnostics(rows, target, _trend_ok([r["gap"] for r in rows]))


def _trend_ok(gaps: Sequence[float], tol: float = TREND_TOLERANCE) -> bool:
    """Non-increasing within ``tol`` over the last quartile."""
    if len(gaps) < 2:
        return True
    tail = gaps[len(gaps) - max(2, len(gaps) // 4):]
    return all(b <= a + tol for a, b in zip(tail, tail[1:]))
