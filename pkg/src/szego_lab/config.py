"""
Experiment configuration: a YAML document describing the measure, the
numerical resolution and command options.

Example::

    grid: 4096
    precision: 256
    degree: 64
    weight:
      kind: poly-modulus
      factors: [[0.5, 0.0, 1.0]]
    interior: [[0.3, 0.0, 0.5]]      # re, im, mass
    exterior: [[2.0, 0.0, 1.0]]
    points: [[3, 0], [0, 2]]
    options:
      ell: all

Errors are collected, not raised one at a time, and each carries the line
of the offending key when it can be located.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import yaml

from .circle import NEAR_CIRCLE_FACTOR, UnitCircleGrid
from .measure import (WEIGHT_KINDS, ExteriorMasses, InteriorAtoms, PerturbedMeasure,
                      SzegoWeight, power_tilt)

DEFAULT_POINTS = ((3.0, 0.0), (0.0, 2.0), (-1.5, -1.5))

TOP_KEYS = {"grid", "precision", "degree", "seed", "points", "weight",
            "interior", "exterior", "options"}
OPTION_DEFAULTS = {
    "ell": "all",
    "amplitude": "auto",
    "v_source": "koosis",
    "trials": 1000,
    "trial_degree": 32,
    "koosis_source": "weight",
    "weights": 10,
    "tilt_exponent": 0.5,
}
WEIGHT_KEYS = {
    "constant": {"kind", "value"},
    "poly-modulus": {"kind", "factors"},
    "exp-trig": {"kind", "cos", "sin"},
    "table": {"kind", "samples"},
}


@dataclass(frozen=True)
class LocatedError:
    field: str
    message: str
    line: int | None = None

    def __str__(self):
        where = f"line {self.line}: " if self.line else ""
        return f"{where}{self.field}: {self.message}"


class ConfigError(ValueError):
    def __init__(self, errors: list[LocatedError]):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors))


@dataclass(frozen=True)
class ExperimentConfig:
    weight: dict
    grid: int = 4096
    precision: int = 256
    degree: int = 64
    seed: int = 0
    points: tuple = DEFAULT_POINTS
    interior: tuple = ()
    exterior: tuple = ()
    options: dict = field(default_factory=lambda: dict(OPTION_DEFAULTS))

    @property
    def circle(self) -> UnitCircleGrid:
        return UnitCircleGrid(self.grid)

    def measure(self) -> PerturbedMeasure:
        g = self.circle
        return PerturbedMeasure(
            SzegoWeight.from_declaration(self.weight, g),
            InteriorAtoms([(complex(a, b), m) for a, b, m in self.interior]),
            ExteriorMasses([(complex(a, b), m) for a, b, m in self.exterior]),
        )

    def eval_points(self) -> list[complex]:
        return [complex(a, b) for a, b in self.points]

    def tilt(self):
        return power_tilt(self.options["tilt_exponent"])

    @property
    def ell(self) -> int | None:
        e = self.options["ell"]
        return None if e == "all" else int(e)

    @property
    def amplitude(self) -> float | None:
        a = self.options["amplitude"]
        return None if a == "auto" else float(a)

    def echo(self) -> dict:
        d = asdict(self)
        d["points"] = [list(p) for p in self.points]
        d["interior"] = [list(p) for p in self.interior]
        d["exterior"] = [list(p) for p in self.exterior]
        return d


def _line_map(text: str) -> dict[str, int]:
    """Dotted key path -> 1-based line number."""
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return {}
    out: dict[str, int] = {}

    def walk(node, prefix):
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                key = f"{prefix}.{k.value}" if prefix else str(k.value)
                out[key] = k.start_mark.line + 1
                walk(v, key)
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                key = f"{prefix}[{i}]"
                out[key] = v.start_mark.line + 1
                walk(v, key)

    if root is not None:
        walk(root, "")
    return out


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x) -> bool:
    return (isinstance(x, (int, float)) and not isinstance(x, bool)
            and math.isfinite(x))


class _Checker:
    def __init__(self, lines):
        self.lines = lines
        self.errors: list[LocatedError] = []

    def fail(self, path, msg):
        line = self.lines.get(path)
        if line is None:
            # fall back to the nearest located ancestor
            p = path
            while line is None and ("." in p or "[" in p):
                p = p.rsplit(".", 1)[0] if p.rfind(".") > p.rfind("[") else p.rsplit("[", 1)[0]
                line = self.lines.get(p)
        self.errors.append(LocatedError(path, msg, line))

    def int_in(self, path, value, lo, hi):
        if not _is_int(value):
            self.fail(path, f"expected an integer, got {value!r}")
            return False
        if not lo <= value <= hi:
            self.fail(path, f"out of range [{lo}, {hi}]: {value}")
            return False
        return True

    def number_list(self, path, value, length=None):
        if not isinstance(value, list):
            self.fail(path, "expected a list of numbers")
            return False
        ok = True
        for i, x in enumerate(value):
            if not _is_num(x):
                self.fail(f"{path}[{i}]", f"expected a finite number, got {x!r}")
                ok = False
        if ok and length is not None and len(value) != length:
            self.fail(path, f"expected {length} entries, got {len(value)}")
            ok = False
        return ok

    def unknown(self, path, mapping, allowed):
        for k in mapping:
            if k not in allowed:
                self.fail(f"{path}.{k}" if path else str(k), f"unknown key {k!r}")


def parse_config(text: str, overrides: dict | None = None) -> ExperimentConfig:
    """Parse and validate a config; raise :class:`ConfigError` listing every
    problem found.  ``overrides`` (from command-line flags) replace top-level
    values before validation."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError([LocatedError("<document>", f"syntax error: {exc}", line)]) from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError([LocatedError("<document>", "top level must be a mapping", 1)])
    data = dict(data)
    for k, v in (overrides or {}).items():
        if v is not None:
            data[k] = v

    ck = _Checker(_line_map(text))
    ck.unknown("", data, TOP_KEYS)

    grid = data.get("grid", 4096)
    if ck.int_in("grid", grid, 64, 1 << 20) and grid & (grid - 1):
        ck.fail("grid", f"must be a power of two, got {grid}")
    grid_ok = _is_int(grid) and 64 <= grid <= (1 << 20) and not grid & (grid - 1)
    precision = data.get("precision", 256)
    ck.int_in("precision", precision, 64, 8192)
    degree = data.get("degree", 64)
    ck.int_in("degree", degree, 0, (grid // 2 - 1) if grid_ok else 1 << 19)
    seed = data.get("seed", 0)
    ck.int_in("seed", seed, 0, 2 ** 64 - 1)

    points = data.get("points", [list(p) for p in DEFAULT_POINTS])
    if not isinstance(points, list):
        ck.fail("points", "expected a list of [re, im] pairs")
        points = []
    for i, p in enumerate(points):
        if ck.number_list(f"points[{i}]", p, 2) and grid_ok:
            if abs(complex(*p)) - 1.0 < NEAR_CIRCLE_FACTOR / grid:
                ck.fail(f"points[{i}]", f"|z| must exceed 1 + {NEAR_CIRCLE_FACTOR}/N")

    weight = data.get("weight")
    if weight is None:
        ck.fail("weight", "missing required key")
    elif not isinstance(weight, dict):
        ck.fail("weight", "expected a mapping with a 'kind' key")
    else:
        kind = weight.get("kind")
        if kind not in WEIGHT_KINDS:
            ck.fail("weight.kind", f"expected one of {WEIGHT_KINDS}, got {kind!r}")
        else:
            ck.unknown("weight", weight, WEIGHT_KEYS[kind])
            if kind == "constant":
                v = weight.get("value")
                if not _is_num(v):
                    ck.fail("weight.value", f"expected a finite number, got {v!r}")
                elif v <= 0:
                    ck.fail("weight.value", f"out of range: constant weight must be > 0, got {v}")
            elif kind == "poly-modulus":
                factors = weight.get("factors", [])
                if not isinstance(factors, list):
                    ck.fail("weight.factors", "expected a list of [a_re, a_im, s]")
                else:
                    for i, f in enumerate(factors):
                        path = f"weight.factors[{i}]"
                        if ck.number_list(path, f, 3) and abs(abs(complex(f[0], f[1])) - 1) < 1e-9:
                            ck.fail(path, "|a| must differ from 1")
            elif kind == "exp-trig":
                for key in ("cos", "sin"):
                    ck.number_list(f"weight.{key}", weight.get(key, []))
            elif kind == "table":
                ck.number_list("weight.samples", weight.get("samples"),
                               grid if grid_ok else None)

    atoms = {}
    for name in ("interior", "exterior"):
        lst = data.get(name, [])
        if not isinstance(lst, list):
            ck.fail(name, "expected a list of [re, im, mass]")
            lst = []
        for i, a in enumerate(lst):
            path = f"{name}[{i}]"
            if ck.number_list(path, a, 3) and a[2] <= 0:
                ck.fail(path, f"mass must be positive, got {a[2]}")
        atoms[name] = tuple(tuple(float(x) for x in a) for a in lst
                            if isinstance(a, list) and len(a) == 3)

    options = data.get("options", {}) or {}
    if not isinstance(options, dict):
        ck.fail("options", "expected a mapping")
        options = {}
    ck.unknown("options", options, OPTION_DEFAULTS)
    opts = dict(OPTION_DEFAULTS)
    opts.update({k: v for k, v in options.items() if k in OPTION_DEFAULTS})
    if opts["ell"] != "all":
        ck.int_in("options.ell", opts["ell"], 0, len(atoms["exterior"]))
    if opts["amplitude"] != "auto" and not (_is_num(opts["amplitude"]) and opts["amplitude"] > 0):
        ck.fail("options.amplitude", f"expected 'auto' or a positive number, got {opts['amplitude']!r}")
    if opts["v_source"] not in ("koosis", "aggregate", "one"):
        ck.fail("options.v_source", f"expected koosis, aggregate or one, got {opts['v_source']!r}")
    if opts["koosis_source"] not in ("weight", "aggregate", "random"):
        ck.fail("options.koosis_source",
                f"expected weight, aggregate or random, got {opts['koosis_source']!r}")
    ck.int_in("options.trials", opts["trials"], 1, 10 ** 6)
    ck.int_in("options.weights", opts["weights"], 1, 10 ** 5)
    ck.int_in("options.trial_degree", opts["trial_degree"], 1,
              (grid // 4 - 1) if grid_ok else 1 << 18)
    if not (_is_num(opts["tilt_exponent"]) and opts["tilt_exponent"] > 0):
        ck.fail("options.tilt_exponent", "expected a positive number")

    if ck.errors:
        raise ConfigError(ck.errors)
    weight = dict(weight)
    if weight["kind"] == "poly-modulus":
        weight["factors"] = [[float(x) for x in f] for f in weight.get("factors", [])]
    return ExperimentConfig(
        weight=weight,
        grid=grid,
        precision=precision,
        degree=degree,
        seed=seed,
        points=tuple(tuple(float(x) for x in p) for p in points),
        interior=atoms["interior"],
        exterior=atoms["exterior"],
        options=opts,
    )


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), overrides)
