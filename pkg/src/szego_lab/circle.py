"""
Functions on the unit circle sampled on a uniform grid.

Quadrature is the trapezoidal rule against normalized arclength, which is
exact for trigonometric polynomials of degree below N/2.  Every Fourier
multiplier (harmonic conjugation, analytic completion, Riesz projection) acts
on the discrete spectrum returned by :func:`analyze`.

The Nyquist mode n = -N/2 is treated as a negative frequency by
:func:`riesz_project` and is annihilated by :func:`harmonic_conjugate`, so all
identities between the multipliers hold exactly for data band-limited below
N/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "UnitCircleGrid",
    "BoundaryFunction",
    "FourierSpectrum",
    "OuterFunction",
    "NearCircleError",
    "SingularPoleError",
    "integrate",
    "analyze",
    "synthesize",
    "harmonic_conjugate",
    "analytic_completion",
    "riesz_project",
    "poisson_kernel",
    "herglotz",
    "outer_exterior",
    "outer_interior",
]

DEFAULT_GRID_SIZE = 4096
# refuse exterior evaluation closer than NEAR_CIRCLE_FACTOR / N to the circle
NEAR_CIRCLE_FACTOR = 10.0


class NearCircleError(ValueError):
    """Evaluation point too close to the unit circle for the grid resolution."""


class SingularPoleError(ValueError):
    """Kernel pole sits on the unit circle."""


@dataclass(frozen=True)
class UnitCircleGrid:
    """Equispaced nodes theta_j = 2 pi j / N on the unit circle."""

    size: int = DEFAULT_GRID_SIZE

    def __post_init__(self):
        n = self.size
        if not isinstance(n, (int, np.integer)) or n < 64 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 64, got {n!r}")

    @cached_property
    def theta(self) -> np.ndarray:
        t = 2.0 * np.pi * np.arange(self.size) / self.size
        t.setflags(write=False)
        return t

    @cached_property
    def points(self) -> np.ndarray:
        z = np.exp(1j * self.theta)
        z.setflags(write=False)
        return z

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Integer frequencies in FFT storage order."""
        f = np.fft.fftfreq(self.size, d=1.0 / self.size).astype(int)
        f.setflags(write=False)
        return f

    def function(self, values) -> "BoundaryFunction":
        return BoundaryFunction(self, values)

    def constant(self, c) -> "BoundaryFunction":
        return BoundaryFunction(self, np.full(self.size, c))

    def sample(self, fn) -> "BoundaryFunction":
        """Evaluate ``fn(theta)`` on the nodes."""
        return BoundaryFunction(self, fn(self.theta))


class BoundaryFunction:
    """Complex (or real) samples of a function at the nodes of a grid.

    Arithmetic with scalars, numpy arrays of matching length, and other
    boundary functions on the same grid is supported; results are new
    objects and the stored samples are read-only.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: UnitCircleGrid, values):
        values = np.array(values)
        if values.ndim != 1 or values.shape[0] != grid.size:
            raise ValueError(
                f"expected {grid.size} samples, got shape {values.shape}"
            )
        if not (np.issubdtype(values.dtype, np.floating)
                or np.issubdtype(values.dtype, np.complexfloating)):
            values = values.astype(float)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("BoundaryFunction is immutable")

    def __repr__(self):
        return f"BoundaryFunction(N={self.grid.size}, dtype={self.values.dtype})"

    def __len__(self):
        return self.grid.size

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)

    def _other(self, other):
        if isinstance(other, BoundaryFunction):
            if other.grid.size != self.grid.size:
                raise ValueError("boundary functions live on different grids")
            return other.values
        return other

    def _wrap(self, values):
        return BoundaryFunction(self.grid, values)

    def __add__(self, other):
        return self._wrap(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.values - self._other(other))

    def __rsub__(self, other):
        return self._wrap(self._other(other) - self.values)

    def __mul__(self, other):
        return self._wrap(self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(self.values / self._other(other))

    def __rtruediv__(self, other):
        return self._wrap(self._other(other) / self.values)

    def __neg__(self):
        return self._wrap(-self.values)

    def __abs__(self):
        return self._wrap(np.abs(self.values))

    def __pow__(self, p):
        return self._wrap(self.values ** p)

    @property
    def real(self) -> "BoundaryFunction":
        return self._wrap(np.real(self.values).copy())

    @property
    def imag(self) -> "BoundaryFunction":
        return self._wrap(np.imag(self.values).copy())

    def conj(self) -> "BoundaryFunction":
        return self._wrap(np.conj(self.values))

    def apply(self, fn) -> "BoundaryFunction":
        """Apply a vectorized function to the samples."""
        return self._wrap(fn(self.values))

    def min(self) -> float:
        return float(np.min(np.real(self.values)))

    def max(self) -> float:
        return float(np.max(np.real(self.values)))


@dataclass(frozen=True)
class FourierSpectrum:
    """Discrete Fourier coefficients, stored in FFT order.

    ``coefficient(n)`` approximates the integral of f e^{-in theta} dm for
    n in [-N/2, N/2).
    """

    grid: UnitCircleGrid
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.shape != (self.grid.size,):
            raise ValueError(
                f"spectrum of size {c.shape} does not match grid {self.grid.size}"
            )
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def coefficient(self, n: int) -> complex:
        half = self.grid.size // 2
        if not -half <= n < half:
            raise IndexError(f"frequency {n} outside [-{half}, {half})")
        return complex(self.coefficients[n % self.grid.size])

    def centered(self) -> tuple[np.ndarray, np.ndarray]:
        """Frequencies -N/2..N/2-1 with matching coefficients."""
        return (np.fft.fftshift(self.grid.frequencies),
                np.fft.fftshift(self.coefficients))

    def multiply(self, multiplier) -> "FourierSpectrum":
        return FourierSpectrum(self.grid, self.coefficients * multiplier)


def integrate(f: BoundaryFunction) -> complex | float:
    """Trapezoidal quadrature of f against normalized arclength."""
    s = np.mean(f.values)
    return float(s) if f.is_real else complex(s)


def analyze(f: BoundaryFunction) -> FourierSpectrum:
    return FourierSpectrum(f.grid, np.fft.fft(f.values) / f.grid.size)


def synthesize(s: FourierSpectrum) -> BoundaryFunction:
    return BoundaryFunction(s.grid, np.fft.ifft(s.coefficients) * s.grid.size)


def _require_real(g: BoundaryFunction, what: str) -> np.ndarray:
    v = g.values
    if np.iscomplexobj(v):
        scale = max(1.0, float(np.max(np.abs(v))))
        if np.max(np.abs(v.imag)) > 1e-12 * scale:
            raise ValueError(f"{what} requires real-valued input")
        v = v.real
    return v


def harmonic_conjugate(g: BoundaryFunction) -> BoundaryFunction:
    """Fourier multiplier -i sgn(n); cos -> sin, sin -> -cos."""
    v = _require_real(g, "harmonic conjugation")
    n = g.grid.size
    c = np.fft.rfft(v)
    c[0] = 0.0
    c[-1] = 0.0  # Nyquist
    return BoundaryFunction(g.grid, np.fft.irfft(-1j * c, n))


def analytic_completion(u: BoundaryFunction) -> BoundaryFunction:
    """Boundary values of the analytic function in the disk with real part u
    and real value at 0, i.e. u + i u~.  Spectrum: u^(0) + 2 (positive part)."""
    v = _require_real(u, "analytic completion")
    n = u.grid.size
    c = np.fft.rfft(v) / n
    c[1:-1] *= 2.0
    spectrum = np.zeros(n, dtype=complex)
    spectrum[: n // 2 + 1] = c
    return BoundaryFunction(u.grid, np.fft.ifft(spectrum) * n)


def riesz_project(f: BoundaryFunction) -> BoundaryFunction:
    """Orthogonal projection onto frequencies n >= 0 (Nyquist dropped)."""
    s = analyze(f)
    keep = s.grid.frequencies >= 0
    keep[s.grid.size // 2] = False
    return synthesize(s.multiply(keep))


def poisson_kernel(pole: complex, grid: UnitCircleGrid) -> BoundaryFunction:
    """Poisson kernel of the disk (|pole| < 1) or of its exterior (|pole| > 1)."""
    r2 = abs(pole) ** 2
    if abs(abs(pole) - 1.0) <= 1e-9:
        raise SingularPoleError(f"pole {pole} lies on the unit circle")
    d2 = np.abs(grid.points - pole) ** 2
    return BoundaryFunction(grid, abs(1.0 - r2) / d2)


def _real_spectrum_half(u: BoundaryFunction) -> np.ndarray:
    v = _require_real(u, "Herglotz transform")
    return np.fft.rfft(v) / u.grid.size


def _herglotz_series(c: np.ndarray, p):
    # c[0] + 2 sum_{0<n<N/2} c[n] p^n + c[N/2] p^{N/2}, by Horner
    coeffs = c.copy()
    coeffs[1:-1] *= 2.0
    p = np.asarray(p, dtype=complex)
    acc = np.zeros_like(p)
    for a in coeffs[::-1]:
        acc = acc * p + a
    return acc


def herglotz(u: BoundaryFunction, p):
    """Schwarz-Herglotz integral of real boundary data u at |p| < 1.

    Evaluated through the Fourier series of the kernel,
    (e^{it}+p)/(e^{it}-p) = 1 + 2 sum p^n e^{-int}, so the result is the
    analytic completion of u continued into the disk.  Accepts arrays of p.
    """
    pa = np.asarray(p, dtype=complex)
    if np.any(np.abs(pa) >= 1.0):
        raise ValueError("Herglotz transform needs |p| < 1")
    out = _herglotz_series(_real_spectrum_half(u), pa)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class OuterFunction:
    """Outer function determined by its boundary log-modulus.

    Interior orientation: G(p) = exp(herglotz(l, p)) for |p| < 1.
    Exterior orientation: psi(z) = conj(G(1/conj z)) for |z| > 1, so that
    |psi| = e^l on the circle and psi(inf) = exp(mean l) > 0.
    """

    log_modulus: BoundaryFunction
    orientation: str = "exterior"

    def __post_init__(self):
        if self.orientation not in ("interior", "exterior"):
            raise ValueError(f"unknown orientation {self.orientation!r}")
        v = _require_real(self.log_modulus, "outer function")
        if not np.all(np.isfinite(v)):
            raise ValueError("log-modulus must be finite at every node")
        if v is not self.log_modulus.values:
            object.__setattr__(self, "log_modulus",
                               BoundaryFunction(self.log_modulus.grid, v))

    @property
    def grid(self) -> UnitCircleGrid:
        return self.log_modulus.grid

    @cached_property
    def _half_spectrum(self) -> np.ndarray:
        return _real_spectrum_half(self.log_modulus)

    @property
    def value_at_center(self) -> float:
        """psi(inf) for exterior, G(0) for interior."""
        return float(np.exp(np.mean(self.log_modulus.values)))

    def boundary_values(self) -> BoundaryFunction:
        g = analytic_completion(self.log_modulus).apply(np.exp)
        return g.conj() if self.orientation == "exterior" else g

    def __call__(self, z, *, strict: bool = True):
        """Evaluate off the circle.  ``strict=False`` lifts the near-circle
        refusal for exterior points (used to probe radial limits)."""
        za = np.asarray(z, dtype=complex)
        n = self.grid.size
        if self.orientation == "interior":
            if np.any(np.abs(za) >= 1.0):
                raise ValueError("interior outer function needs |z| < 1")
            out = np.exp(_herglotz_series(self._half_spectrum, za))
        else:
            if np.any(np.isinf(za)):
                raise ValueError("use value_at_center for the point at infinity")
            mod = np.abs(za)
            if np.any(mod <= 1.0):
                raise ValueError("exterior outer function needs |z| > 1")
            if strict and np.any(mod - 1.0 < NEAR_CIRCLE_FACTOR / n):
                raise NearCircleError(
                    f"|z| - 1 < {NEAR_CIRCLE_FACTOR}/N; refine the grid"
                )
            p = 1.0 / np.conj(za)
            out = np.conj(np.exp(_herglotz_series(self._half_spectrum, p)))
        return complex(out) if out.ndim == 0 else out


def outer_exterior(log_modulus: BoundaryFunction, z):
    """Exterior outer function with |psi| = exp(log_modulus) on the circle."""
    return OuterFunction(log_modulus, "exterior")(z)


def outer_interior(log_modulus: BoundaryFunction, z):
    return OuterFunction(log_modulus, "interior")(z)
