"""Full constructive wiring: W -> W~ -> V -> psi~ -> F = psi~ B -> q_n."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import (QnDiagnostics, TailSeries, blaschke_boundary, blaschke_eval,
                          default_amplitude, modified_outer, qn_diagnostics, tail_series)
from .circle import BoundaryFunction, OuterFunction
from .koosis import KoosisPair, koosis_weight
from .measure import (AggregateWeight, PerturbedMeasure, aggregate_weight, default_tilt,
                      inflate_weight)

V_SOURCES = ("koosis", "aggregate", "one")


@dataclass(frozen=True)
class ChainResult:
    aggregate: AggregateWeight
    inflated: BoundaryFunction
    pair: KoosisPair | None
    V: BoundaryFunction
    amplitude: float
    psi_tilde: OuterFunction
    tail: TailSeries
    diagnostics: QnDiagnostics
    predicted_leading: float

    def leading_exact(self) -> bool:
        """The z^n coefficient of every q_n is tau_0, bit for bit."""
        t0 = self.tail.coefficients[0]
        return all(complex(r["leading"]) == complex(t0) for r in self.diagnostics.rows)

    @property
    def leading_gap(self) -> float:
        return abs(complex(self.tail.coefficients[0]) - self.predicted_leading)

    def summary(self) -> dict:
        psi_inf = szego_outer_value(self)
        return {
            "W_min": self.aggregate.W.min(),
            "W_max": self.aggregate.W.max(),
            "W_tilde_max": self.inflated.max(),
            "V_min": self.V.min(),
            "V_max": self.V.max(),
            "log_V_integral": float(np.mean(np.log(np.real(self.V.values)))),
            "amplitude": self.amplitude,
            "psi_tilde_inf": self.psi_tilde.value_at_center,
            "psi_inf": psi_inf,
            "tau0": complex(self.tail.coefficients[0]),
            "predicted_leading": self.predicted_leading,
            "leading_gap": self.leading_gap,
            "leading_exact": self.leading_exact(),
            "hardy_residual": self.tail.residual,
            "target": self.diagnostics.target,
            "trend_ok": self.diagnostics.trend_ok,
        }


def szego_outer_value(result: ChainResult) -> float:
    w = np.real(result.aggregate.w.values)
    return math.exp(-0.5 * float(np.mean(np.log(w))))


def run_chain(mu: PerturbedMeasure, degree: int, *, amplitude: float | None = None,
              v_source: str = "koosis", tilt=default_tilt) -> ChainResult:
    mu.require_valid()
    agg = aggregate_weight(mu, tilt)
    Wt = inflate_weight(agg)
    pair = None
    if v_source == "koosis":
        pair = koosis_weight(Wt)
        V = pair.V
    elif v_source == "aggregate":
        V = agg.W
    elif v_source == "one":
        V = mu.grid.constant(1.0)
    else:
        raise ValueError(f"unknown V source {v_source!r}; expected one of {V_SOURCES}")
    A = default_amplitude(mu.weight, V) if amplitude is None else float(amplitude)
    psit = modified_outer(mu.weight, V, A)
    zeros = mu.exterior.locations
    F = psit.boundary_values() * blaschke_boundary(zeros, mu.grid)
    tail = tail_series(F)
    if degree > tail.order:
        raise ValueError(f"degree {degree} exceeds N/2 - 1 = {tail.order}")
    diag = qn_diagnostics(mu, tail, range(degree + 1), W=agg.W)
    predicted = psit.value_at_center * blaschke_eval(zeros, math.inf)
    return ChainResult(agg, Wt, pair, V, A, psit, tail, diag, predicted)
