"""
The measure mu = nu + w dm + sum_k mu_k delta_{z_k} and the boundary weights
derived from it.

``nu`` is a finite list of interior atoms; ``w`` is a strictly positive
weight sampled on a :class:`~szego_lab.circle.UnitCircleGrid`; the exterior
masses sit at distinct points with |z_k| > 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .circle import BoundaryFunction, UnitCircleGrid, integrate, poisson_kernel

# samples below this are treated as zero (log w must be computable)
POSITIVITY_FLOOR = 1e-300

WEIGHT_KINDS = ("constant", "poly-modulus", "exp-trig", "table")


class InvalidMeasureError(ValueError):
    """The measure fails one of its admissibility checks."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        failed = "; ".join(c.message for c in report.failures)
        super().__init__(f"inadmissible measure: {failed}")


def evaluate_weight(declaration: dict, grid: UnitCircleGrid) -> np.ndarray:
    """Sample a declared weight on the grid.

    Supported declarations (``kind`` key):

    * ``constant``: ``value`` c
    * ``poly-modulus``: ``factors`` list of (a_re, a_im, s) giving
      prod |1 - a e^{i theta}|^{2 s}
    * ``exp-trig``: ``cos`` list a_0, a_1, ... and ``sin`` list b_1, b_2, ...
      giving exp(sum a_j cos j theta + sum b_j sin j theta)
    * ``table``: ``samples``, exactly N values
    """
    kind = declaration.get("kind")
    theta = grid.theta
    if kind == "constant":
        return np.full(grid.size, float(declaration["value"]))
    if kind == "poly-modulus":
        out = np.ones(grid.size)
        for a_re, a_im, s in declaration.get("factors", []):
            a = complex(a_re, a_im)
            if abs(abs(a) - 1.0) < 1e-12:
                raise ValueError(f"poly-modulus factor with |a| = 1 ({a})")
            out *= np.abs(1.0 - a * grid.points) ** (2.0 * s)
        return out
    if kind == "exp-trig":
        expo = np.zeros(grid.size)
        for j, a in enumerate(declaration.get("cos", [])):
            expo += a * np.cos(j * theta)
        for j, b in enumerate(declaration.get("sin", []), start=1):
            expo += b * np.sin(j * theta)
        return np.exp(expo)
    if kind == "table":
        samples = np.asarray(declaration["samples"], dtype=float)
        if samples.shape != (grid.size,):
            raise ValueError(
                f"table weight has {samples.size} samples, grid needs {grid.size}"
            )
        return samples
    raise ValueError(f"unknown weight kind {kind!r}; expected one of {WEIGHT_KINDS}")


@dataclass(frozen=True)
class SzegoWeight:
    samples: BoundaryFunction
    declaration: dict = field(default_factory=lambda: {"kind": "table"})

    @classmethod
    def from_declaration(cls, declaration: dict, grid: UnitCircleGrid) -> "SzegoWeight":
        return cls(BoundaryFunction(grid, evaluate_weight(declaration, grid)),
                   dict(declaration))

    @classmethod
    def constant(cls, value: float, grid: UnitCircleGrid) -> "SzegoWeight":
        return cls.from_declaration({"kind": "constant", "value": value}, grid)

    @property
    def grid(self) -> UnitCircleGrid:
        return self.samples.grid

    def log_integral(self) -> float:
        """Quadrature of log w dm (-inf or nan if w is not positive)."""
        v = self.samples.values
        with np.errstate(divide="ignore", invalid="ignore"):
            return float(np.mean(np.log(v)))

    def shifted(self, steps: int) -> "SzegoWeight":
        """The weight rotated by 2 pi steps / N, i.e. w(theta - alpha)."""
        return SzegoWeight(
            BoundaryFunction(self.grid, np.roll(self.samples.values, steps)),
            {"kind": "table"},
        )


def _atoms(points) -> tuple[tuple[complex, float], ...]:
    return tuple((complex(z), float(m)) for z, m in points)


@dataclass(frozen=True)
class InteriorAtoms:
    atoms: tuple[tuple[complex, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", _atoms(self.atoms))

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    @property
    def locations(self) -> np.ndarray:
        return np.array([z for z, _ in self.atoms], dtype=complex)

    @property
    def masses(self) -> np.ndarray:
        return np.array([m for _, m in self.atoms], dtype=float)


@dataclass(frozen=True)
class ExteriorMasses(InteriorAtoms):
    """Point masses outside the closed disk, in declaration order."""


@dataclass(frozen=True)
class PerturbedMeasure:
    weight: SzegoWeight
    interior: InteriorAtoms = InteriorAtoms()
    exterior: ExteriorMasses = ExteriorMasses()

    def __post_init__(self):
        if not isinstance(self.interior, InteriorAtoms):
            object.__setattr__(self, "interior", InteriorAtoms(self.interior))
        if not isinstance(self.exterior, ExteriorMasses):
            object.__setattr__(self, "exterior", ExteriorMasses(self.exterior))

    @property
    def grid(self) -> UnitCircleGrid:
        return self.weight.grid

    def total_mass(self) -> float:
        return (integrate(self.weight.samples)
                + float(self.interior.masses.sum())
                + float(self.exterior.masses.sum()))

    def rotated(self, steps: int) -> "PerturbedMeasure":
        """Rotate every component by alpha = 2 pi steps / N."""
        rot = np.exp(2j * np.pi * steps / self.grid.size)
        return PerturbedMeasure(
            self.weight.shifted(steps),
            InteriorAtoms([(z * rot, m) for z, m in self.interior]),
            ExteriorMasses([(z * rot, m) for z, m in self.exterior]),
        )

    def require_valid(self) -> "PerturbedMeasure":
        report = validate(self)
        if not report.ok:
            raise InvalidMeasureError(report)
        return self


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    message: str


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate(mu: PerturbedMeasure) -> ValidationReport:
    """Check the admissibility hypotheses on mu; never raises."""
    checks = []

    def add(name, passed, value, ok_msg, bad_msg):
        checks.append(Check(name, bool(passed), float(value),
                            ok_msg if passed else bad_msg))

    w = mu.weight.samples.values
    finite = bool(np.all(np.isfinite(w)))
    wmin = float(np.min(w)) if finite else float("nan")
    add("strict positivity", finite and wmin > POSITIVITY_FLOOR, wmin,
        "weight strictly positive", "strict positivity violated: weight sample <= 1e-300")
    wint = integrate(mu.weight.samples) if finite else float("nan")
    add("integrable weight", finite and math.isfinite(wint), wint,
        "weight integrable", "weight not integrable on the grid")
    logint = mu.weight.log_integral() if finite and wmin > POSITIVITY_FLOOR else float("-inf")
    add("szego condition", math.isfinite(logint), logint,
        "integral of log w finite", "Szego condition violated: integral of log w not finite")

    zin = mu.interior.locations
    rin = float(np.max(np.abs(zin))) if len(zin) else 0.0
    add("interior inside disk", rin < 1.0, rin,
        "interior atoms inside the disk", "interior location outside open disk")
    min_in = float(mu.interior.masses.min()) if len(zin) else 1.0
    add("interior masses positive", min_in > 0 and math.isfinite(min_in), min_in,
        "interior masses positive", "interior mass not positive")

    zex = mu.exterior.locations
    rex = float(np.min(np.abs(zex))) if len(zex) else float("inf")
    add("exterior outside disk", rex > 1.0, rex if len(zex) else 0.0,
        "exterior masses outside the closed disk", "exterior location inside disk")
    min_ex = float(mu.exterior.masses.min()) if len(zex) else 1.0
    add("exterior masses positive", min_ex > 0 and math.isfinite(min_ex), min_ex,
        "exterior masses positive", "exterior mass not positive")
    if len(zex) > 1:
        gaps = np.abs(zex[:, None] - zex[None, :]) + np.eye(len(zex))
        mingap = float(gaps.min())
    else:
        mingap = float("inf")
    add("exterior distinct", mingap > 1e-12, mingap if len(zex) > 1 else 0.0,
        "exterior locations distinct", "exterior locations repeated")
    blaschke = float(np.sum(np.abs(zex) - 1.0)) if len(zex) else 0.0
    add("blaschke condition", math.isfinite(blaschke), blaschke,
        "sum of |z_k| - 1 finite", "Blaschke sum not finite")

    total = mu.total_mass() if finite else float("nan")
    add("total mass", math.isfinite(total) and total > 0, total,
        "total mass finite and positive", "total mass not finite and positive")
    return ValidationReport(tuple(checks))


def mass_weight(exterior: ExteriorMasses, grid: UnitCircleGrid) -> BoundaryFunction:
    """Sum of exterior Poisson kernels weighted by the masses."""
    out = np.zeros(grid.size)
    for z, m in exterior:
        out += m * poisson_kernel(z, grid).values
    return BoundaryFunction(grid, out)


def default_tilt(r: float) -> float:
    return (1.0 - r) ** -0.5


def power_tilt(exponent: float) -> Callable[[float], float]:
    """phi(r) = (1 - r)^(-exponent)."""
    if exponent <= 0:
        raise ValueError("tilt exponent must be positive")
    return lambda r: (1.0 - r) ** -exponent


def sweep_interior(interior: InteriorAtoms, grid: UnitCircleGrid,
                   tilt: Callable[[float], float] = default_tilt) -> BoundaryFunction:
    """Harmonic sweeping of the tilted interior measure onto the circle."""
    out = np.zeros(grid.size)
    for z, m in interior:
        out += m * tilt(abs(z)) * poisson_kernel(z, grid).values
    return BoundaryFunction(grid, out)


@dataclass(frozen=True)
class AggregateWeight:
    """W = 1 + w + w_1 + w_2 with its parts kept separately."""

    w: BoundaryFunction
    w1: BoundaryFunction
    w2: BoundaryFunction

    @property
    def W(self) -> BoundaryFunction:
        return 1.0 + self.w + self.w1 + self.w2

    @property
    def grid(self) -> UnitCircleGrid:
        return self.w.grid


def aggregate_weight(mu: PerturbedMeasure,
                     tilt: Callable[[float], float] = default_tilt) -> AggregateWeight:
    g = mu.grid
    return AggregateWeight(
        BoundaryFunction(g, np.real(mu.weight.samples.values).astype(float)),
        mass_weight(mu.exterior, g),
        sweep_interior(mu.interior, g, tilt),
    )


def inflate_weight(W) -> BoundaryFunction:
    """W (1 + ln W); needs W >= 1."""
    if isinstance(W, AggregateWeight):
        W = W.W
    if W.min() < 1.0 - 1e-12:
        raise ValueError("inflation needs W >= 1")
    return W * (1.0 + np.log(np.maximum(W.values, 1.0)))


def random_measure(rng: np.random.Generator, grid: UnitCircleGrid, *,
                   max_exterior: int = 3, max_interior: int = 3,
                   min_exterior: int = 0,
                   exterior_radius: Sequence[float] = (1.3, 3.0),
                   max_factors: int = 2) -> PerturbedMeasure:
    """Draw an admissible measure with a poly-modulus weight.

    Factors have |a| <= 0.7 or |a| >= 1.5 and exponents in [-1, 1];
    interior atoms satisfy |zeta| <= 0.9; exterior masses are distinct with
    modulus in ``exterior_radius``.  All masses lie in [0.1, 2].
    """
    factors = []
    for _ in range(rng.integers(0, max_factors + 1)):
        if rng.random() < 0.5:
            r = rng.uniform(0.0, 0.7)
        else:
            r = rng.uniform(1.5, 3.0)
        a = r * np.exp(2j * np.pi * rng.random())
        factors.append((float(a.real), float(a.imag), float(rng.uniform(-1.0, 1.0))))
    weight = SzegoWeight.from_declaration({"kind": "poly-modulus", "factors": factors}, grid)

    interior = []
    for _ in range(rng.integers(0, max_interior + 1)):
        z = rng.uniform(0.0, 0.9) * np.exp(2j * np.pi * rng.random())
        interior.append((z, rng.uniform(0.1, 2.0)))

    lo, hi = exterior_radius
    exterior = []
    for _ in range(rng.integers(min_exterior, max_exterior + 1)):
        while True:
            z = rng.uniform(lo, hi) * np.exp(2j * np.pi * rng.random())
            if all(abs(z - zz) > 0.05 for zz, _ in exterior):
                break
        exterior.append((z, rng.uniform(0.1, 2.0)))
    return PerturbedMeasure(weight, InteriorAtoms(interior), ExteriorMasses(exterior))
