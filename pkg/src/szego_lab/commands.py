"""
Command pipelines behind the CLI.  Each returns a :class:`RunReport`;
invariant failures become failed checks, module exceptions become an
``error`` entry naming the module that raised.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import asymptotics as asy
from . import koosis as ks
from .circle import UnitCircleGrid
from .config import ConfigError, ExperimentConfig, LocatedError
from .measure import (ExteriorMasses, InteriorAtoms, PerturbedMeasure, SzegoWeight,
                      random_measure, validate)
from .oracle import orthonormal_coefficients
from .ortho import gram, orthonormal_set, orthonormality_defect, orthonormalize
from .pipeline import run_chain
from .report import RunReport

log = logging.getLogger(__name__)

COMMANDS = ("validate", "tau", "corollary", "qn", "koosis", "chain", "selftest")

RESIDUE_DEFECT_LIMIT = 1e-6
ORTHOGONALITY_LIMIT = 1e-9
LEADING_GAP_LIMIT = 1e-10


def _tail_quartile(values):
    return values[len(values) - max(2, len(values) // 4):]


def _decreasing(values, tol=asy.TREND_TOLERANCE) -> bool:
    tail = _tail_quartile(values)
    return all(b <= a + tol for a, b in zip(tail, tail[1:]))


def _validated(cfg: ExperimentConfig, report: RunReport) -> PerturbedMeasure | None:
    mu = cfg.measure()
    vr = validate(mu)
    for c in vr.checks:
        if not c.passed:
            report.check(f"measure: {c.name}", False, c.value)
    if not vr.ok:
        report.summary["validation"] = [c.message for c in vr.failures]
        return None
    return mu


def cmd_validate(cfg, report, jobs):
    vr = validate(cfg.measure())
    report.tables["validation"] = [
        {"check": c.name, "passed": c.passed, "value": c.value, "message": c.message}
        for c in vr.checks
    ]
    for c in vr.checks:
        report.check(c.name, c.passed, c.value)
    report.summary["ok"] = vr.ok


def cmd_tau(cfg, report, jobs):
    mu = _validated(cfg, report)
    if mu is None:
        return
    G = gram(mu, cfg.degree, cfg.precision)
    ops = orthonormalize(G)
    rows = asy.tau_table(mu, ops, cfg.ell)
    report.tables["tau"] = rows
    limit = asy.predicted_tau_limit(mu)
    report.summary.update({
        "predicted_limit": limit,
        "tau_last": rows[-1]["tau"],
        "gap_last": rows[-1]["gap"],
        "ell": len(mu.exterior) if cfg.ell is None else cfg.ell,
    })
    report.check("tau positive", all(r["tau"] > 0 for r in rows))
    report.check("tau <= residue bound", all(r["bound_ok"] for r in rows),
                 max(r["tau"] - r["bound"] for r in rows), 1e-8)
    worst = max(r["defect"] for r in rows)
    report.check("residue identity defect", worst <= RESIDUE_DEFECT_LIMIT, worst,
                 RESIDUE_DEFECT_LIMIT)
    d = orthonormality_defect(ops, G)
    report.check("C G C* = I", d < 2.0 ** (-cfg.precision / 2), d, 2.0 ** (-cfg.precision / 2))


def cmd_corollary(cfg, report, jobs):
    mu = _validated(cfg, report)
    if mu is None:
        return
    ops = orthonormal_set(mu, cfg.degree, cfg.precision)
    pts = cfg.eval_points()
    rows = asy.corollary_report(mu, ops, pts)
    report.tables["corollary"] = rows
    report.summary.update({
        "boundary_defect_last": rows[-1]["boundary_defect"],
        "errors_last": [rows[-1][f"error_{i}"] for i in range(len(pts))],
    })
    report.check("boundary defect decreasing", _decreasing([r["boundary_defect"] for r in rows]))
    for i in range(len(pts)):
        report.check(f"error at point {i} decreasing",
                     _decreasing([r[f"error_{i}"] for r in rows]))


def _chain_checks(result, report):
    report.check("leading coefficient equals tau_0 exactly", result.leading_exact())
    report.check("tau_0 = psi~(inf) B(inf)", result.leading_gap <= LEADING_GAP_LIMIT,
                 result.leading_gap, LEADING_GAP_LIMIT)
    report.check("norm trend over last quartile", result.diagnostics.trend_ok)


def cmd_qn(cfg, report, jobs, v_source=None):
    mu = _validated(cfg, report)
    if mu is None:
        return None
    result = run_chain(mu, cfg.degree, amplitude=cfg.amplitude,
                       v_source=v_source or cfg.options["v_source"], tilt=cfg.tilt())
    report.tables["qn"] = result.diagnostics.rows
    report.summary.update(result.summary())
    _chain_checks(result, report)
    return result


def cmd_chain(cfg, report, jobs):
    result = cmd_qn(cfg, report, jobs, v_source="koosis")
    if result is None:
        return
    pair = result.pair
    viol = pair.invariant_violations()
    for name, count in viol.items():
        report.check(f"koosis pair: {name}", count == 0, count, 0)
    report.check("log V integrable", math.isfinite(pair.log_V_integral), pair.log_V_integral)
    trials, deg = cfg.options["trials"], cfg.options["trial_degree"]
    conj = ks.certify_conjugation(pair, trials, deg, cfg.seed)
    report.summary["conjugation"] = conj.summary
    report.check("conjugation bound", conj.passed, conj.summary["max_ratio"], 2.0 + 1e-6)


def _koosis_weights(cfg: ExperimentConfig):
    g = cfg.circle
    src = cfg.options["koosis_source"]
    if src == "weight":
        W = cfg.measure().weight.samples.real
        if W.min() < 1.0:
            raise ConfigError([LocatedError(
                "options.koosis_source",
                f"source 'weight' needs w >= 1 everywhere (min {W.min():.6g})")])
        return [W]
    if src == "aggregate":
        mu = cfg.measure().require_valid()
        Wt, _ = ks.koosis_chain_for_measure(mu, cfg.tilt())
        return [Wt]
    return [ks.random_weight(np.random.default_rng([cfg.seed, 100, i]), g)
            for i in range(cfg.options["weights"])]


def _certify_one(args):
    idx, W, trials, deg, seed = args
    pair = ks.koosis_weight(W)
    conj = ks.certify_conjugation(pair, trials, deg, seed)
    proj = ks.certify_projection(pair, trials, deg, seed)
    orth = float(ks.orthogonality_residuals(pair, 100, min(16, deg), seed).max())
    return idx, pair, conj, proj, orth


def cmd_koosis(cfg, report, jobs):
    weights = _koosis_weights(cfg)
    trials, deg = cfg.options["trials"], cfg.options["trial_degree"]
    tasks = [(i, W, trials, deg, cfg.seed) for i, W in enumerate(weights)]
    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_certify_one, tasks))
    else:
        results = [_certify_one(t) for t in tasks]

    per_weight, conj_rows, proj_rows = [], [], []
    for idx, pair, conj, proj, orth in results:
        viol = pair.invariant_violations()
        per_weight.append({
            "weight": idx,
            "conjugation_max": conj.summary["max_ratio"],
            "projection_max": proj.summary["max_ratio"],
            "projection_constant": proj.summary["constant"],
            "log_V_integral": pair.log_V_integral,
            "rho_min": pair.rho.min(),
            "pointwise_violations": sum(viol.values()),
            "orthogonality_max": orth,
        })
        conj_rows += [{"weight": idx, **r} for r in conj.rows]
        proj_rows += [{"weight": idx, **r} for r in proj.rows]
    report.tables["weights"] = per_weight
    report.tables["conjugation"] = conj_rows
    report.tables["projection"] = proj_rows
    cmax = max(r["conjugation_max"] for r in per_weight)
    report.summary.update({
        "max_conjugation_ratio": cmax,
        "max_projection_ratio": max(r["projection_max"] for r in per_weight),
        "projection_constant_min": min(r["projection_constant"] for r in per_weight),
        "grid": cfg.grid,
        "seed": cfg.seed,
        "weights": len(per_weight),
        "trials": trials,
    })
    report.check("conjugation ratio <= 2", all(r["pass"] for r in conj_rows), cmax, 2.0 + 1e-6)
    report.check("projection ratio <= constant", all(r["pass"] for r in proj_rows))
    report.check("v >= W/(2|Omega|^2) and companions",
                 all(r["pointwise_violations"] == 0 for r in per_weight),
                 sum(r["pointwise_violations"] for r in per_weight), 0)
    report.check("log V integrable", all(math.isfinite(r["log_V_integral"]) for r in per_weight))
    omax = max(r["orthogonality_max"] for r in per_weight)
    report.check("int P^2/Omega = 0", omax <= ORTHOGONALITY_LIMIT, omax, ORTHOGONALITY_LIMIT)


def run_selftest(seed: int = 0) -> list[dict]:
    """Module invariants on built-in configurations; one row per check."""
    rows = []

    def add(name, value, threshold, passed=None):
        ok = value <= threshold if passed is None else passed
        rows.append({"check": name, "passed": bool(ok), "value": float(value),
                     "threshold": float(threshold)})

    g = UnitCircleGrid(4096)
    one = SzegoWeight.constant(1.0, g)

    ops = orthonormal_set(PerturbedMeasure(one), 16)
    dev = max(abs(complex(c) - (1.0 if j == n else 0.0))
              for n, row in enumerate(ops.coefficients) for j, c in enumerate(row))
    add("baseline p_n = z^n", dev, 1e-12)

    mu2 = PerturbedMeasure(one, exterior=ExteriorMasses([(2, 1)]))
    ops2 = orthonormal_set(mu2, 30)
    add("single mass tau_30 -> 1/2", abs(ops2.tau[30] - 0.5), 1e-4)

    taus, _ = orthonormal_coefficients([(Fraction(1, 2), 1)], [(Fraction(2), Fraction(1))], 8)
    mub = PerturbedMeasure(
        SzegoWeight.from_declaration({"kind": "poly-modulus", "factors": [[0.5, 0, 1]]}, g),
        exterior=ExteriorMasses([(2, 1)]))
    opsb = orthonormal_set(mub, 8)
    add("exact-moment oracle", max(abs(float(t) - x) for t, x in zip(taus, opsb.tau)), 1e-8)

    rng = np.random.default_rng([seed, 7])
    worst = -math.inf
    for _ in range(5):
        mu = random_measure(rng, g, min_exterior=1)
        o = orthonormal_set(mu, 20)
        for n in range(0, 21, 4):
            for ell in (1, None):
                rb = asy.residue_upper_bound(mu, o, n, ell)
                worst = max(worst, rb.tau - rb.bound)
    add("tau <= residue bound (random)", worst, 1e-8)

    cmax, viol, omax = 0.0, 0, 0.0
    for i in range(20):
        pair = ks.koosis_weight(ks.random_weight(np.random.default_rng([seed, 8, i]), g))
        cmax = max(cmax, ks.certify_conjugation(pair, 200, 32, seed).summary["max_ratio"])
        viol += sum(pair.invariant_violations().values())
        omax = max(omax, float(ks.orthogonality_residuals(pair, 20, 16, seed).max()))
    add("conjugation ratio <= 2", cmax, 2.0 + 1e-6)
    add("pointwise Koosis invariants", viol, 0)
    add("int P^2/Omega = 0", omax, ORTHOGONALITY_LIMIT)

    mu3 = PerturbedMeasure(one, InteriorAtoms([(0.3, 0.5)]), ExteriorMasses([(2, 1)]))
    res = run_chain(mu3, 32)
    add("q_n leading coefficient exact", 0.0, 0.0, res.leading_exact())
    add("tau_0 = psi~(inf) B(inf)", res.leading_gap, LEADING_GAP_LIMIT)
    return rows


def cmd_selftest(cfg, report, jobs):
    rows = run_selftest(cfg.seed if cfg else 0)
    report.tables["selftest"] = rows
    for r in rows:
        report.check(r["check"], r["passed"], r["value"], r["threshold"])


_DISPATCH = {
    "validate": cmd_validate,
    "tau": cmd_tau,
    "corollary": cmd_corollary,
    "qn": cmd_qn,
    "koosis": cmd_koosis,
    "chain": cmd_chain,
    "selftest": cmd_selftest,
}


def run(command: str, cfg: ExperimentConfig | None, jobs: int = 1) -> RunReport:
    if command not in _DISPATCH:
        raise ValueError(f"unknown command {command!r}; expected one of {COMMANDS}")
    report = RunReport(command, cfg.echo() if cfg else None)
    t0 = time.perf_counter()
    try:
        _DISPATCH[command](cfg, report, jobs)
    except ConfigError as exc:
        report.config_error = True
        report.error = {"module": "szego_lab.config", "type": "ConfigError", "message": str(exc)}
    except (ArithmeticError, ValueError) as exc:
        mod = type(exc).__module__
        tb = exc.__traceback__
        while tb is not None:
            name = tb.tb_frame.f_globals.get("__name__", "")
            if name.startswith("szego_lab"):
                mod = name
            tb = tb.tb_next
        report.error = {"module": mod, "type": type(exc).__name__, "message": str(exc)}
        log.error("%s failed in %s: %s", command, mod, exc)
    report.timing = {"command": command, "seconds": time.perf_counter() - t0}
    log.info("%s finished in %.3f s", command, report.timing["seconds"])
    return report
