"""Linear-programming core, ℓ1-quotient norms and basis-pursuit solvers."""

from .denoise import DenoiseResult, bp_denoise
from .quotient import QuotientResult, basis_pursuit, quotient_norm
from .simplex import LPResult, lp_solve

__all__ = ["LPResult", "lp_solve", "QuotientResult", "quotient_norm", "basis_pursuit",
           "DenoiseResult", "bp_denoise"]
