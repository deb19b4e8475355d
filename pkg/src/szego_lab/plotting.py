"""Figures written next to the CSV tables of a run."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {
    "figure.figsize": (6.4, 4.0),
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 120,
}
# deterministic PNG bytes
_META = {"Software": None}


def _floor(values, eps=1e-300):
    return np.maximum(np.asarray(values, dtype=float), eps)


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, metadata=_META)
    plt.close(fig)
    return path


def plot_tau(rows, path):
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
        n = [r["n"] for r in rows]
        ax1.plot(n, [r["tau"] for r in rows], "o-", ms=3, label=r"$\tau_n$")
        ax1.plot(n, [r["bound"] for r in rows], "--", lw=1, label="residue bound")
        ax1.axhline(rows[0]["predicted"], color="k", lw=0.8, label="limit")
        ax1.set_xlabel("n")
        ax1.legend(frameon=False)
        ax2.semilogy(n, _floor([r["gap"] for r in rows]), "o-", ms=3)
        ax2.set_xlabel("n")
        ax2.set_ylabel(r"$|\tau_n - \lim|$")
        return _save(fig, path)


def plot_corollary(rows, points, path):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        n = [r["n"] for r in rows]
        ax.semilogy(n, _floor([r["boundary_defect"] for r in rows]), "k-", label="boundary defect")
        for i, z in enumerate(points):
            ax.semilogy(n, _floor([r[f"error_{i}"] for r in rows]), "o-", ms=2,
                        label=f"z = {z.real:g}{z.imag:+g}i")
        ax.set_xlabel("n")
        ax.legend(frameon=False, fontsize=8)
        return _save(fig, path)


def plot_qn(rows, path):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        n = [r["n"] for r in rows]
        ax.semilogy(n, _floor([r["gap"] for r in rows]), label=r"$|\|q_n\|^2 - \int|F|^2 w|$")
        ax.semilogy(n, _floor([r["exterior"] for r in rows]), label="exterior part")
        ax.semilogy(n, _floor([r["interior"] for r in rows]), label="interior part")
        if "weighted_defect" in rows[0]:
            ax.semilogy(n, _floor([r["weighted_defect"] for r in rows]), ":",
                        label=r"$\|S_n - F\|^2_{L^2(W)}$")
        ax.set_xlabel("n")
        ax.legend(frameon=False, fontsize=8)
        return _save(fig, path)


def _hist(ax, values, bins=40):
    v = np.asarray(values, dtype=float)
    lo, hi = float(v.min()), float(v.max())
    pad = max(1e-3 * max(abs(lo), abs(hi), 1.0), (hi - lo) * 0.02)
    ax.hist(v, bins=bins, range=(lo - pad, hi + pad))


def plot_koosis(conj_rows, proj_rows, path):
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
        _hist(ax1, [r["ratio"] for r in conj_rows])
        ax1.axvline(conj_rows[0]["bound"], color="r", lw=1)
        ax1.set_xlabel("conjugation ratio")
        _hist(ax2, [r["ratio"] for r in proj_rows])
        ax2.axvline(max(r["bound"] for r in proj_rows), color="r", lw=1)
        ax2.set_xlabel("projection ratio")
        return _save(fig, path)


def render(report, out_dir) -> list[Path]:
    """Figures for whichever tables the report carries."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t = report.tables
    made = []
    if t.get("tau"):
        made.append(plot_tau(t["tau"], out / "tau.png"))
    if t.get("corollary"):
        pts = [complex(*p) for p in report.config["points"]]
        made.append(plot_corollary(t["corollary"], pts, out / "corollary.png"))
    if t.get("qn"):
        made.append(plot_qn(t["qn"], out / "qn.png"))
    if t.get("conjugation") and t.get("projection"):
        made.append(plot_koosis(t["conjugation"], t["projection"], out / "koosis.png"))
    return made
