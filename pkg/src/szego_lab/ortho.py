"""
Orthonormal polynomials in L^2(mu) from the Gram matrix of monomials.

Entries grow like max|z_k|^{2N}, so the Gram matrix is assembled and
factored in mpmath at a configurable binary precision.  The circle part of
every entry comes from a single FFT of the weight samples; atoms contribute
exact sums of powers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import mpmath
import numpy as np
from mpmath import mp

from .circle import analyze, integrate
from .measure import PerturbedMeasure

log = logging.getLogger(__name__)

DEFAULT_PRECISION = 256
DEFAULT_DEGREE = 64
DEGREE_WARNING = 128
# bits the circle part of the largest entry must keep: one double mantissa
_CIRCLE_BITS = 53


class PrecisionRangeError(ArithmeticError):
    """Entries span more binary orders than the working precision resolves."""


class NotPositiveDefiniteError(ArithmeticError):
    pass


@dataclass(frozen=True)
class GramMatrix:
    """Hermitian matrix G[j][k] = <z^j, z^k> in L^2(mu), entries as mpc."""

    entries: tuple[tuple[mpmath.mpc, ...], ...]
    precision: int

    @property
    def order(self) -> int:
        return len(self.entries)

    def to_complex(self) -> np.ndarray:
        return np.array([[complex(x) for x in row] for row in self.entries])


def _powers(z: complex, degree: int) -> list:
    zz = mpmath.mpc(z)
    out = [mpmath.mpc(1)]
    for _ in range(degree):
        out.append(out[-1] * zz)
    return out


def gram(mu: PerturbedMeasure, degree: int, precision: int = DEFAULT_PRECISION) -> GramMatrix:
    """Gram matrix of 1, z, ..., z^degree.

    Raises :class:`PrecisionRangeError` when the exterior masses inflate the
    entries past what ``precision`` bits can hold next to the circle part.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")
    if degree > DEGREE_WARNING:
        log.warning("degree %d above %d: entries grow like max|z_k|^(2N)",
                    degree, DEGREE_WARNING)
    ext = mu.exterior.locations
    if len(ext):
        span = 2 * degree * math.log2(float(np.max(np.abs(ext))))
        span += math.log2(max(1.0, float(mu.exterior.masses.max())))
        if span + _CIRCLE_BITS > precision:
            raise PrecisionRangeError(
                f"entries reach 2^{span:.0f}; {precision} bits cannot resolve the "
                f"circle part - use a smaller degree or a larger precision"
            )

    spectrum = analyze(mu.weight.samples)
    n = degree + 1
    with mp.workprec(precision):
        # circle part: G[j][k] = c(k - j) with c(n) = int w e^{-in theta} dm
        circ = [mpmath.mpc(spectrum.coefficient(d)) for d in range(n)]
        rows = [[mpmath.mpc(0)] * n for _ in range(n)]
        for j in range(n):
            for k in range(j, n):
                rows[j][k] = circ[k - j]
        for atoms in (mu.interior, mu.exterior):
            for z, m in atoms:
                pw = _powers(z, degree)
                cpw = [p.conjugate() for p in pw]
                mm = mpmath.mpf(m)
                for j in range(n):
                    a = mm * pw[j]
                    row = rows[j]
                    for k in range(j, n):
                        row[k] += a * cpw[k]
        for j in range(n):
            rows[j][j] = mpmath.mpc(rows[j][j].real, 0)
            for k in range(j + 1, n):
                rows[k][j] = rows[j][k].conjugate()
        entries = tuple(tuple(r) for r in rows)
    return GramMatrix(entries, precision)


@dataclass(frozen=True)
class OrthonormalSet:
    """Coefficient table of p_0, ..., p_N: p_n(z) = sum_j c[n][j] z^j."""

    coefficients: tuple[tuple[mpmath.mpc, ...], ...]
    precision: int

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @cached_property
    def tau(self) -> np.ndarray:
        """Leading coefficients as floats."""
        return np.array([float(self.coefficients[n][n].real)
                         for n in range(self.degree + 1)])

    def tau_exact(self, n: int) -> mpmath.mpf:
        return self.coefficients[n][n].real

    def row(self, n: int) -> np.ndarray:
        """Coefficients of p_n rounded to complex doubles, lowest degree first."""
        self._check(n)
        return np.array([complex(c) for c in self.coefficients[n]])

    def _check(self, n: int):
        if not 0 <= n <= self.degree:
            raise IndexError(f"degree {n} outside 0..{self.degree}")


def orthonormalize(G: GramMatrix) -> OrthonormalSet:
    """Cholesky G = L L^* without pivoting; the coefficient table is L^{-1}."""
    n = G.order
    with mp.workprec(G.precision):
        A = G.entries
        L = [[mpmath.mpc(0)] * n for _ in range(n)]
        for j in range(n):
            Lj = L[j]
            conj_j = [Lj[k].conjugate() for k in range(j)]
            s = A[j][j].real - mpmath.fsum(abs(x) ** 2 for x in Lj[:j])
            if s <= 0:
                raise NotPositiveDefiniteError(
                    f"not positive definite at current precision (pivot {j}); "
                    f"increase the precision"
                )
            d = mpmath.sqrt(s)
            Lj[j] = mpmath.mpc(d)
            for i in range(j + 1, n):
                Li = L[i]
                acc = A[i][j] - mpmath.fdot(Li[:j], conj_j)
                Li[j] = acc / d
        # forward substitution for C = L^{-1}, row by row
        C = [[mpmath.mpc(0)] * n for _ in range(n)]
        for i in range(n):
            inv = 1 / L[i][i].real
            C[i][i] = mpmath.mpc(inv)
            Li = L[i]
            for j in range(i):
                acc = mpmath.fdot(Li[j:i], [C[k][j] for k in range(j, i)])
                C[i][j] = -acc * inv
        coeffs = tuple(tuple(C[i][: i + 1]) for i in range(n))
    return OrthonormalSet(coeffs, G.precision)


def orthonormal_set(mu: PerturbedMeasure, degree: int,
                    precision: int = DEFAULT_PRECISION) -> OrthonormalSet:
    return orthonormalize(gram(mu, degree, precision))


def orthonormality_defect(ops: OrthonormalSet, G: GramMatrix) -> float:
    """max |(C G C^*)_{jk} - delta_{jk}|, computed at the working precision."""
    n = ops.degree + 1
    with mp.workprec(ops.precision):
        rows = [list(r) + [mpmath.mpc(0)] * (n - len(r)) for r in ops.coefficients]
        CG = [[mpmath.fdot(rows[i], [G.entries[k][j] for k in range(n)])
               for j in range(n)] for i in range(n)]
        worst = mpmath.mpf(0)
        for i in range(n):
            for j in range(n):
                v = mpmath.fdot(CG[i], [x.conjugate() for x in rows[j]])
                worst = max(worst, abs(v - (1 if i == j else 0)))
    return float(worst)


def horner(coefficients: Sequence, z, precision: int = DEFAULT_PRECISION,
           exact: bool = False):
    """Evaluate sum_j coefficients[j] z^j in mpmath."""
    with mp.workprec(precision):
        zz = mpmath.mpc(z)
        acc = mpmath.mpc(0)
        for c in reversed(coefficients):
            acc = acc * zz + mpmath.mpc(c)
        return acc if exact else complex(acc)


def eval_poly(ops: OrthonormalSet, n: int, z, exact: bool = False):
    """p_n(z), evaluated at the precision of the set."""
    ops._check(n)
    return horner(ops.coefficients[n], z, ops.precision, exact)


def eval_scaled(ops: OrthonormalSet, n: int, z) -> complex:
    """p_n(z) / z^n for z != 0."""
    ops._check(n)
    with mp.workprec(ops.precision):
        zz = mpmath.mpc(z)
        w = 1 / zz
        acc = mpmath.mpc(0)
        # sum_j c_j z^{j-n} = sum_m c_{n-m} w^m
        for c in ops.coefficients[n]:
            acc = acc * w + c
        return complex(acc)


def boundary_values(coefficients: Sequence, grid) -> np.ndarray:
    """Samples of the polynomial at the grid nodes (double precision)."""
    c = np.array([complex(x) for x in coefficients])
    if len(c) >= grid.size:
        raise ValueError("polynomial degree must stay below the grid size")
    padded = np.zeros(grid.size, dtype=complex)
    padded[: len(c)] = c
    return np.fft.ifft(padded) * grid.size


def l2_norm(mu: PerturbedMeasure, coefficients: Sequence,
            precision: int = DEFAULT_PRECISION) -> float:
    """sqrt(int |p|^2 w dm + sum m_i |p(zeta_i)|^2 + sum mu_k |p(z_k)|^2)."""
    grid = mu.grid
    vals = boundary_values(coefficients, grid)
    circle = integrate(grid.function(np.abs(vals) ** 2 * mu.weight.samples.values))
    atoms = 0.0
    for z, m in list(mu.interior) + list(mu.exterior):
        atoms += m * abs(horner(coefficients, z, precision)) ** 2
    return math.sqrt(circle + atoms)
