"""
Weighted bounds for harmonic conjugation and the Riesz projection.

Given a weight W >= 1, build the analytic Omega with Re Omega = W on the
circle, rho = 1 - |1 - W/Omega|, the small weight v = rho / W, and V = 1/v.
The conjugation bound int g~^2 v dm <= 2 int g^2 / W dm and the projection
bound from L^2(V) to L^2(W) are then checked on random trigonometric
polynomials.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circle import (BoundaryFunction, UnitCircleGrid, analytic_completion,
                     harmonic_conjugate, integrate)
from .measure import PerturbedMeasure, aggregate_weight, default_tilt, inflate_weight

log = logging.getLogger(__name__)

DEGENERATE_RHO = 1e-14
RESOLUTION_WARNING_RHO = 1e-10
CONJUGATION_CONSTANT = 2.0


class DegenerateWeightError(ArithmeticError):
    """rho collapsed to zero on the grid; the weight is under-resolved."""


def herglotz_outer(W: BoundaryFunction) -> BoundaryFunction:
    """Boundary values of Omega: W^(0) + 2 * (positive-frequency part of W)."""
    if W.min() < 1.0 - 1e-12:
        raise ValueError("herglotz_outer needs W >= 1")
    return analytic_completion(W)


@dataclass(frozen=True)
class KoosisPair:
    W: BoundaryFunction
    Omega: BoundaryFunction
    rho: BoundaryFunction
    v: BoundaryFunction
    V: BoundaryFunction
    log_V_integral: float

    @property
    def grid(self) -> UnitCircleGrid:
        return self.W.grid

    def lower_bound(self) -> np.ndarray:
        """W / (2 |Omega|^2), which v dominates pointwise."""
        return self.W.values / (2.0 * np.abs(self.Omega.values) ** 2)

    def invariant_violations(self, rel: float = 1e-12) -> dict:
        """Node counts violating each pointwise invariant (relative slack rel)."""
        W, rho, v, V = (np.real(a.values) for a in (self.W, self.rho, self.v, self.V))
        return {
            "rho_range": int(np.sum((rho <= 0) | (rho > 1 + rel))),
            "v_below_1_over_W": int(np.sum(v > (1 + rel) / W)),
            "V_above_W": int(np.sum(V < W * (1 - rel))),
            "v_lower_bound": int(np.sum(v < self.lower_bound() * (1 - rel))),
        }


def koosis_weight(W: BoundaryFunction) -> KoosisPair:
    Wr = np.real(W.values).astype(float)
    Omega = herglotz_outer(W)
    rho = 1.0 - np.abs(1.0 - Wr / Omega.values)
    rmin = float(rho.min())
    if rmin <= DEGENERATE_RHO:
        raise DegenerateWeightError(
            f"rho reaches {rmin:.3e}; grid too coarse for this weight"
        )
    if rmin < RESOLUTION_WARNING_RHO:
        log.warning("rho drops to %.3e: weight near the grid resolution limit", rmin)
    v = rho / Wr
    V = 1.0 / v
    g = W.grid
    return KoosisPair(
        W=BoundaryFunction(g, Wr),
        Omega=Omega,
        rho=BoundaryFunction(g, rho),
        v=BoundaryFunction(g, v),
        V=BoundaryFunction(g, V),
        log_V_integral=float(np.mean(np.log(V))),
    )


def random_weight(rng: np.random.Generator, grid: UnitCircleGrid, degree: int = 5) -> BoundaryFunction:
    """W = 1 + (sum_{j<=degree} a_j cos j theta + b_j sin j theta)^2, normal coefficients."""
    a = rng.standard_normal(degree + 1)
    b = rng.standard_normal(degree + 1)
    j = np.arange(degree + 1)[:, None]
    t = grid.theta[None, :]
    T = a @ np.cos(j * t) + b @ np.sin(j * t)
    return BoundaryFunction(grid, 1.0 + T ** 2)


@lru_cache(maxsize=8)
def _trig_basis(size: int, degree: int):
    theta = 2.0 * np.pi * np.arange(size) / size
    j = np.arange(1, degree + 1)[:, None]
    return np.cos(j * theta), np.sin(j * theta)


def _coefficient_mask(rng: np.random.Generator, trials: int, degree: int) -> tuple:
    degs = rng.integers(1, degree + 1, size=trials)
    mask = np.arange(1, degree + 1)[None, :] <= degs[:, None]
    return degs, mask


@lru_cache(maxsize=8)
def _real_samples(size: int, trials: int, degree: int, seed: int):
    """Random mean-zero real g and their conjugates on the grid."""
    rng = np.random.default_rng([seed, 0])
    degs, mask = _coefficient_mask(rng, trials, degree)
    a = rng.standard_normal((trials, degree)) * mask
    b = rng.standard_normal((trials, degree)) * mask
    cos, sin = _trig_basis(size, degree)
    g = a @ cos + b @ sin
    gt = a @ sin - b @ cos
    return degs, g ** 2, gt ** 2


@lru_cache(maxsize=8)
def _complex_samples(size: int, trials: int, degree: int, seed: int):
    """Random complex f with frequencies in [-degree, degree], and P+ f."""
    rng = np.random.default_rng([seed, 1])
    degs, mask = _coefficient_mask(rng, trials, degree)
    full = np.concatenate([mask[:, ::-1], np.ones((trials, 1), bool), mask], axis=1)
    c = (rng.standard_normal((trials, 2 * degree + 1))
         + 1j * rng.standard_normal((trials, 2 * degree + 1))) * full
    theta = 2.0 * np.pi * np.arange(size) / size
    freqs = np.arange(-degree, degree + 1)
    E = np.exp(1j * freqs[:, None] * theta[None, :])
    f = c @ E
    pf = c[:, degree:] @ E[degree:]
    return degs, np.abs(f) ** 2, np.abs(pf) ** 2


def _summary(rows: list, ratios: np.ndarray, constant: float, size: int, seed: int) -> dict:
    return {
        "max_ratio": float(ratios.max()),
        "constant": constant,
        "grid": size,
        "seed": seed,
        "trials": len(rows),
        "passed": bool(all(r["pass"] for r in rows)),
    }


@dataclass(frozen=True)
class CertificationReport:
    rows: list
    summary: dict

    @property
    def passed(self) -> bool:
        return self.summary["passed"]


def certify_conjugation(pair: KoosisPair, trials: int = 1000, max_degree: int = 32,
                        seed: int = 0) -> CertificationReport:
    """Random real mean-zero g: ratio int g~^2 v / int g^2 (1/W) <= 2, and the
    sharper int g~^2 v <= int g^2 (2 - rho)/W."""
    N = pair.grid.size
    if trials < 1:
        raise ValueError("need at least one trial")
    if not 1 <= max_degree < N // 4:
        raise ValueError(f"degree must lie in [1, {N // 4})")
    degs, g2, gt2 = _real_samples(N, trials, max_degree, seed)
    inv_w = 1.0 / np.real(pair.W.values)
    rho = np.real(pair.rho.values)
    num = gt2 @ np.real(pair.v.values)
    den = g2 @ inv_w
    middle = g2 @ ((2.0 - rho) * inv_w)
    ratios = num / den
    rows = []
    for t in range(trials):
        ok = ratios[t] <= CONJUGATION_CONSTANT + 1e-6 and num[t] <= middle[t] * (1 + 1e-9) + 1e-300
        rows.append({"trial": t, "degree": int(degs[t]), "ratio": float(ratios[t]),
                     "middle_ratio": float(num[t] / middle[t]),
                     "bound": CONJUGATION_CONSTANT, "pass": bool(ok)})
    return CertificationReport(rows, _summary(rows, ratios, CONJUGATION_CONSTANT, N, seed))


def conjugation_ratio(pair: KoosisPair, g: BoundaryFunction) -> float:
    """int g~^2 v dm / int g^2 (1/W) dm for one real mean-zero g."""
    gt = harmonic_conjugate(g).values
    gv = np.real(g.values)
    return float(np.mean(gt ** 2 * np.real(pair.v.values))
                 / np.mean(gv ** 2 / np.real(pair.W.values)))


def projection_constant(pair: KoosisPair) -> float:
    """3/4 (||W||_1 + 1 + 2): mean term, identity term, conjugation term."""
    return 0.75 * (integrate(pair.W) + 3.0)


def certify_projection(pair: KoosisPair, trials: int = 1000, max_degree: int = 32,
                       seed: int = 0) -> CertificationReport:
    """Random complex f: int |P+ f|^2 W / int |f|^2 V against the constant
    from :func:`projection_constant`."""
    N = pair.grid.size
    if trials < 1:
        raise ValueError("need at least one trial")
    if not 1 <= max_degree < N // 4:
        raise ValueError(f"degree must lie in [1, {N // 4})")
    degs, f2, pf2 = _complex_samples(N, trials, max_degree, seed)
    C = projection_constant(pair)
    ratios = (pf2 @ np.real(pair.W.values)) / (f2 @ np.real(pair.V.values))
    rows = [{"trial": t, "degree": int(degs[t]), "ratio": float(ratios[t]),
             "bound": C, "pass": bool(ratios[t] <= C)} for t in range(trials)]
    return CertificationReport(rows, _summary(rows, ratios, C, N, seed))


def orthogonality_residuals(pair: KoosisPair, trials: int = 100, degree: int = 16,
                            seed: int = 0) -> np.ndarray:
    """|int P^2 / Omega dm| for random analytic P with P(0) = 0."""
    rng = np.random.default_rng([seed, 2])
    N = pair.grid.size
    c = np.zeros((trials, N), dtype=complex)
    c[:, 1:degree + 1] = (rng.standard_normal((trials, degree))
                          + 1j * rng.standard_normal((trials, degree)))
    P = np.fft.ifft(c, axis=1) * N
    return np.abs(np.mean(P ** 2 / pair.Omega.values[None, :], axis=1))


def koosis_chain_for_measure(mu: PerturbedMeasure, tilt=default_tilt):
    """W -> W~ = W (1 + ln W) -> Koosis pair of W~."""
    W = aggregate_weight(mu, tilt)
    Wt = inflate_weight(W)
    return Wt, koosis_weight(Wt)
