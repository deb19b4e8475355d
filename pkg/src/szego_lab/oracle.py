"""
Exact reference computation for poly-modulus weights with real rational
parameters.

Moments come from expanding prod (1 - a z)^s (1 - a/z)^s as a Laurent
polynomial with :class:`fractions.Fraction` coefficients (no quadrature),
atoms at real rational points add exact powers, and the monic orthogonal
polynomials are produced by classical Gram-Schmidt in rational arithmetic.
Only the final normalization takes a square root, in mpmath.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Sequence

import mpmath
from mpmath import mp


def laurent_weight(factors: Sequence[tuple[Fraction, int]]) -> dict[int, Fraction]:
    """Coefficients c_n of w = sum c_n z^n for w = prod |1 - a e^{i theta}|^{2 s},
    with a real rational and s a non-negative integer."""
    w = {0: Fraction(1)}
    for a, s in factors:
        a = Fraction(a)
        if s < 0 or int(s) != s:
            raise ValueError("oracle needs non-negative integer exponents")
        # (1 - a z)^s (1 - a z^{-1})^s
        fac = {}
        for i in range(s + 1):
            for j in range(s + 1):
                c = comb(s, i) * comb(s, j) * (-a) ** (i + j)
                fac[i - j] = fac.get(i - j, Fraction(0)) + c
        new = {}
        for n1, c1 in w.items():
            for n2, c2 in fac.items():
                new[n1 + n2] = new.get(n1 + n2, Fraction(0)) + c1 * c2
        w = new
    return w


def exact_gram(factors, atoms: Sequence[tuple[Fraction, Fraction]], degree: int):
    """G[j][k] = c_{k-j} + sum_atoms m x^{j+k} (real atoms x, masses m)."""
    w = laurent_weight(factors)
    n = degree + 1
    G = [[w.get(k - j, Fraction(0)) for k in range(n)] for j in range(n)]
    for x, m in atoms:
        x, m = Fraction(x), Fraction(m)
        for j in range(n):
            for k in range(n):
                G[j][k] += m * x ** (j + k)
    return G


def _inner(p, q, G):
    return sum(p[j] * q[k] * G[j][k] for j in range(len(p)) for k in range(len(q)))


def monic_orthogonal(G) -> list[list[Fraction]]:
    n = len(G)
    basis: list[list[Fraction]] = []
    norms: list[Fraction] = []
    for d in range(n):
        e = [Fraction(0)] * d + [Fraction(1)]
        phi = list(e)
        for b, nb in zip(basis, norms):
            c = _inner(e, b, G) / nb
            for i, bi in enumerate(b):
                phi[i] -= c * bi
        basis.append(phi)
        norms.append(_inner(phi, phi, G))
    return basis


def orthonormal_coefficients(factors, atoms, degree: int, precision: int = 256):
    """(tau list, coefficient rows), both as mpf, for p_0..p_degree."""
    G = exact_gram(factors, atoms, degree)
    basis = monic_orthogonal(G)
    taus, rows = [], []
    with mp.workprec(precision):
        for phi in basis:
            nrm = _inner(phi, phi, G)
            scale = 1 / mpmath.sqrt(mpmath.mpf(nrm.numerator) / nrm.denominator)
            rows.append([scale * mpmath.mpf(c.numerator) / c.denominator for c in phi])
            taus.append(scale)
    return taus, rows
