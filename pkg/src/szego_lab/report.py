"""
Run reports and their serialization.

Floats are written with 17 significant digits in both JSON and CSV, so the
output is byte-identical across runs with the same (config, seed).  Complex
values become ``[re, im]`` in JSON and a ``_re``/``_im`` column pair in CSV.
Non-finite floats are written as JSON ``null`` and as ``nan``/``inf`` in CSV.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def _float(x: float) -> str:
    return format(float(x), ".17g")


def _plain(x):
    if isinstance(x, np.generic):
        return x.item()
    return x


def to_json(obj, indent: int = 2) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    out = io.StringIO()

    def emit(o, level):
        o = _plain(o)
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if o is None or isinstance(o, bool):
            out.write("null" if o is None else ("true" if o else "false"))
        elif isinstance(o, int):
            out.write(str(o))
        elif isinstance(o, float):
            out.write(_float(o) if math.isfinite(o) else "null")
        elif isinstance(o, complex):
            emit([o.real, o.imag], level)
        elif isinstance(o, str):
            out.write(json.dumps(o))
        elif isinstance(o, dict):
            if not o:
                out.write("{}")
                return
            out.write("{\n")
            for i, (k, v) in enumerate(o.items()):
                out.write(f"{pad}{json.dumps(str(k))}: ")
                emit(v, level + 1)
                out.write(",\n" if i < len(o) - 1 else "\n")
            out.write(end + "}")
        elif isinstance(o, (list, tuple, np.ndarray)):
            items = list(o)
            if not items:
                out.write("[]")
                return
            if all(not isinstance(_plain(v), (dict, list, tuple, np.ndarray)) for v in items):
                out.write("[")
                for i, v in enumerate(items):
                    if i:
                        out.write(", ")
                    emit(v, level + 1)
                out.write("]")
                return
            out.write("[\n")
            for i, v in enumerate(items):
                out.write(pad)
                emit(v, level + 1)
                out.write(",\n" if i < len(items) - 1 else "\n")
            out.write(end + "]")
        else:
            raise TypeError(f"cannot serialize {type(o).__name__}")

    emit(obj, 0)
    out.write("\n")
    return out.getvalue()


def _cell(v) -> list[str]:
    v = _plain(v)
    if isinstance(v, bool):
        return ["true" if v else "false"]
    if isinstance(v, complex):
        return [_float(v.real), _float(v.imag)]
    if isinstance(v, float):
        return [_float(v)]
    return [str(v)]


def to_csv(rows: list[dict]) -> str:
    """CSV text for a list of uniform dict rows."""
    if not rows:
        return ""
    header = []
    for k, v in rows[0].items():
        if isinstance(_plain(v), complex):
            header += [f"{k}_re", f"{k}_im"]
        else:
            header.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        cells = []
        for k in rows[0]:
            cells += _cell(r[k])
        w.writerow(cells)
    return buf.getvalue()


@dataclass
class RunReport:
    command: str
    config: dict | None
    summary: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    error: dict | None = None
    timing: dict = field(default_factory=dict)
    config_error: bool = False

    def check(self, name: str, passed: bool, value=None, threshold=None):
        self.checks.append({"name": name, "passed": bool(passed),
                            "value": value, "threshold": threshold})

    @property
    def passed(self) -> bool:
        return self.error is None and all(c["passed"] for c in self.checks)

    @property
    def exit_code(self) -> int:
        if self.config_error:
            return 2
        return 0 if self.passed else 1

    def machine(self) -> dict:
        """Everything except timing, which would break determinism."""
        return {
            "command": self.command,
            "config": self.config,
            "passed": self.passed,
            "summary": self.summary,
            "checks": self.checks,
            "error": self.error,
            "tables": self.tables,
        }

    def to_json(self) -> str:
        return to_json(self.machine())

    def write(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = [out / "report.json"]
        written[0].write_text(self.to_json(), encoding="utf-8")
        for name, rows in self.tables.items():
            p = out / f"{name}.csv"
            p.write_text(to_csv(rows), encoding="utf-8")
            written.append(p)
        p = out / "timing.json"
        p.write_text(to_json(self.timing), encoding="utf-8")
        written.append(p)
        return written
