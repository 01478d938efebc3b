"""Floating bodies of symmetric random vectors, random polytopes and ℓ1 recovery."""

__version__ = "0.1.0"

from .bodies import (ConvHullUnion, Empirical, GaugeBody, Intersection, LqBall, PolarBounds,
                     closed_form_floating_body, dual_point, gauge, lq_norm, polar, polar_radial,
                     radial, support, support_bounds)
from .errors import (BudgetError, DomainError, MomentError, ParameterError, PolyfloatError,
                     PreconditionError, SizeError, SolverError, StateError, UnsupportedError)
from .l1opt import bp_denoise, basis_pursuit, lp_solve, quotient_norm
from .samplers import (DistributionSpec, projections, sample_matrix, sample_vector, sphere_directions,
                       stable_cdf, stable_quantile)
from .seeding import RngStream, derive_seed

__all__ = [
    "__version__", "ConvHullUnion", "Empirical", "GaugeBody", "Intersection", "LqBall",
    "PolarBounds", "closed_form_floating_body", "dual_point", "gauge", "lq_norm", "polar",
    "polar_radial", "radial", "support", "support_bounds", "BudgetError", "DomainError",
    "MomentError", "ParameterError", "PolyfloatError", "PreconditionError", "SizeError",
    "SolverError", "StateError", "UnsupportedError", "bp_denoise", "basis_pursuit", "lp_solve",
    "quotient_norm", "DistributionSpec", "projections", "sample_matrix", "sample_vector",
    "sphere_directions", "stable_cdf", "stable_quantile", "RngStream", "derive_seed",
]
