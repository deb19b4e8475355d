"""Orthonormal polynomials for Szego measures perturbed by interior atoms
and exterior point masses, with the Koosis weighted-projection construction."""

from .circle import (BoundaryFunction, FourierSpectrum, OuterFunction, UnitCircleGrid,
                     analyze, harmonic_conjugate, herglotz, integrate, outer_exterior,
                     poisson_kernel, riesz_project, synthesize)
from .measure import (AggregateWeight, ExteriorMasses, InteriorAtoms, PerturbedMeasure,
                      SzegoWeight, aggregate_weight, inflate_weight, mass_weight,
                      sweep_interior, validate)
from .ortho import OrthonormalSet, eval_poly, gram, l2_norm, orthonormal_set, orthonormalize
from .asymptotics import (blaschke_eval, build_qn, corollary_report, modified_outer,
                          predicted_exterior_limit, predicted_tau_limit, qn_diagnostics,
                          residue_upper_bound, tail_series)
from .koosis import (KoosisPair, certify_conjugation, certify_projection, herglotz_outer,
                     koosis_chain_for_measure, koosis_weight)

__all__ = [
    "BoundaryFunction", "FourierSpectrum", "OuterFunction", "UnitCircleGrid", "analyze",
    "harmonic_conjugate", "herglotz", "integrate", "outer_exterior", "poisson_kernel",
    "riesz_project", "synthesize", "AggregateWeight", "ExteriorMasses", "InteriorAtoms",
    "PerturbedMeasure", "SzegoWeight", "aggregate_weight", "inflate_weight",
    "mass_weight", "sweep_interior", "validate", "OrthonormalSet", "eval_poly", "gram",
    "l2_norm", "orthonormal_set", "orthonormalize", "blaschke_eval", "build_qn",
    "corollary_report", "modified_outer", "predicted_exterior_limit",
    "predicted_tau_limit", "qn_diagnostics", "residue_upper_bound", "tail_series",
    "KoosisPair", "certify_conjugation", "certify_projection", "herglotz_outer",
    "koosis_chain_for_measure", "koosis_weight",
]

__version__ = "0.1.0"
