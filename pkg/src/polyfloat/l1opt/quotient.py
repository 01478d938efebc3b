"""ℓ1-quotient norms and equality-constrained basis pursuit."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DomainError, SolverError
from .simplex import lp_solve

TOL_FEAS = 1e-8
TOL_DUAL = 1e-8
TOL_GAP = 1e-8


@dataclass
class QuotientResult:
    """Minimal ℓ1 representation of ``w`` in the columns of ``A``.

    Attributes
    ----------
    value : float
        ``min ||v||_1`` over ``A v = w`` (``inf`` when infeasible).
    v : ndarray or None
        One minimiser; ties are resolved by the simplex basis.
    residual : float
        ``||A v - w||_2``.
    y : ndarray or None
        Dual certificate.  ``||A^T y||_inf <= 1`` (``A^T y <= 1`` in
        one-sided mode) and ``<y, w>`` is a lower bound on ``value``.
    status : str
        ``"optimal"``, ``"infeasible"`` or ``"iteration-limit"``.
    """

    value: float
    v: Optional[np.ndarray]
    residual: float
    y: Optional[np.ndarray]
    status: str
    mode: str = "symmetric"
    iterations: int = 0
    dual_value: float = math.nan
    dual_infeasibility: float = math.nan

    @property
    def gap(self) -> float:
        return self.value - self.dual_value

    def to_dict(self):
        return {"status": self.status, "value": self.value, "mode": self.mode,
                "residual": self.residual, "dual_value": self.dual_value,
                "dual_infeasibility": self.dual_infeasibility, "iterations": self.iterations}


def _certify(res: QuotientResult, A, w):
    if res.y is None:
        return res
    Aty = A.T @ res.y
    if res.mode == "symmetric":
        res.dual_infeasibility = max(0.0, float(np.max(np.abs(Aty), initial=0.0)) - 1.0)
    else:
        res.dual_infeasibility = max(0.0, float(np.max(Aty, initial=-math.inf)) - 1.0)
    res.dual_value = float(res.y @ w)
    return res


def quotient_norm(A, w, mode: str = "symmetric", tol: float = TOL_FEAS,
                  pricing: str = "dantzig") -> QuotientResult:
    """Gauge of ``w`` with respect to ``absconv`` (or ``conv``) of the columns of ``A``.

    Parameters
    ----------
    A : (n, N) array
    w : (n,) array
    mode : ``"symmetric"`` minimises ``||v||_1`` over ``A v = w``;
        ``"one_sided"`` minimises ``sum(v)`` over ``A v = w, v >= 0``.
    tol : feasibility tolerance on ``||A v - w||_2``.

    Returns
    -------
    QuotientResult
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    w = np.asarray(w, dtype=float).ravel()
    n, N = A.shape
    if w.size != n:
        raise DomainError(f"w has length {w.size}, expected {n}")
    if mode not in ("symmetric", "one_sided"):
        raise DomainError(f"unknown mode {mode!r}")
    if not np.any(w):
        res = QuotientResult(0.0, np.zeros(N), 0.0, np.zeros(n), "optimal", mode, 0)
        return _certify(res, A, w)
    if mode == "symmetric":
        lp = lp_solve(np.ones(2 * N), np.hstack([A, -A]), w, pricing=pricing)
    else:
        lp = lp_solve(np.ones(N), A, w, pricing=pricing)
    if lp.status == "optimal":
        v = lp.x[:N] - lp.x[N:] if mode == "symmetric" else lp.x.copy()
        resid = float(np.linalg.norm(A @ v - w))
        status = "optimal" if resid <= max(tol, TOL_FEAS) * max(1.0, float(np.linalg.norm(w))) else "infeasible"
        res = QuotientResult(float(np.abs(v).sum()), v, resid, lp.y, status, mode, lp.nit)
    else:
        # unbounded is impossible for a nonnegative objective
        status = "infeasible" if lp.status in ("infeasible", "unbounded") else lp.status
        res = QuotientResult(math.inf, None, math.inf, None, status, mode, lp.nit)
    return _certify(res, A, w)


def basis_pursuit(A, y, tol: float = TOL_FEAS, return_result: bool = False):
    """Minimum-ℓ1 solution of ``A x = y``.

    Raises
    ------
    SolverError
        If the system is infeasible or the iteration cap is hit; the
        :class:`QuotientResult` is attached as ``err.result``.
    """
    res = quotient_norm(A, y, "symmetric", tol)
    if res.status != "optimal":
        raise SolverError(f"basis pursuit failed: {res.status}", res)
    return (res.v, res) if return_result else res.v
