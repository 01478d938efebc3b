"""Quadratically constrained basis pursuit by primal-dual splitting.

Solves ``min ||z||_1  s.t.  ||A z - ybar||_2 <= eta`` with the Chambolle-Pock
iteration.  The dual problem is

    max  <y, ybar> - eta ||y||_2   s.t.  ||A^T y||_inf <= 1,

and a feasible dual point (the scaled iterate) gives a certified lower bound,
so the reported gap is a true optimality measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError


@dataclass
class DenoiseResult:
    z: np.ndarray
    objective: float
    dual_value: float
    residual: float  # ||A z - ybar||_2 after polishing
    iterations: int
    status: str  # "optimal" | "iteration-limit"

    @property
    def gap(self) -> float:
        return self.objective - self.dual_value

    def to_dict(self):
        return {"status": self.status, "value": self.objective, "dual_value": self.dual_value,
                "residual": self.residual, "iterations": self.iterations}


def _soft(x, t):
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def _project_ball(v, center, radius):
    d = v - center
    nd = np.linalg.norm(d)
    if nd <= radius:
        return v
    return center + d * (radius / nd)


def _polish(A, pinv, z, ybar, eta):
    """Move ``z`` minimally (in range(A^T)) so that ``||A z - ybar|| <= eta``."""
    r = A @ z - ybar
    nr = np.linalg.norm(r)
    if nr <= eta:
        return z, nr
    target = r * (eta / nr) if nr > 0 else r
    z = z - pinv @ (r - target)
    return z, float(np.linalg.norm(A @ z - ybar))


def _dual_bound(A, u, ybar, eta):
    y = -u
    s = float(np.max(np.abs(A.T @ y), initial=0.0))
    if s > 1.0:
        y = y / s
    return float(y @ ybar - eta * np.linalg.norm(y))


def bp_denoise(A, ybar, eta: float, tol: float = 1e-6, max_iter: int = 100_000,
               check_every: int = 25, return_result: bool = False):
    """Minimum-ℓ1 vector within distance ``eta`` of the data.

    Parameters
    ----------
    A : (n, N) array
    ybar : (n,) array
    eta : float
        Noise level, ``eta >= 0``.
    tol : float
        Relative tolerance for feasibility and the primal-dual gap.
    max_iter : int
        Iteration cap.

    Returns
    -------
    ndarray or (ndarray, DenoiseResult)
    """
    if not eta >= 0:
        raise DomainError(f"eta must be >= 0, got {eta}")
    A = np.atleast_2d(np.asarray(A, dtype=float))
    ybar = np.asarray(ybar, dtype=float).ravel()
    n, N = A.shape
    if np.linalg.norm(ybar) <= eta:
        res = DenoiseResult(np.zeros(N), 0.0, 0.0, float(np.linalg.norm(ybar)), 0, "optimal")
        return (res.z, res) if return_result else res.z

    L = float(np.linalg.norm(A, 2))
    tau = sigma = 0.99 / L
    pinv = np.linalg.pinv(A)
    z = pinv @ ybar
    zbar = z.copy()
    u = np.zeros(n)
    scale = max(1.0, float(np.linalg.norm(ybar)))
    best = None
    best_dual = -math.inf
    status = "iteration-limit"
    it = 0
    for it in range(1, max_iter + 1):
        v = u + sigma * (A @ zbar)
        u = v - sigma * _project_ball(v / sigma, ybar, eta)
        z_new = _soft(z - tau * (A.T @ u), tau)
        zbar = 2.0 * z_new - z
        z = z_new
        if it % check_every == 0 or it == max_iter:
            infeas = max(0.0, float(np.linalg.norm(A @ z - ybar)) - eta)
            zp, resid = _polish(A, pinv, z, ybar, eta)
            primal = float(np.abs(zp).sum())
            dual = _dual_bound(A, u, ybar, eta)
            best_dual = max(best_dual, dual)
            if best is None or primal < best[1]:
                best = (zp, primal, resid)
            if infeas <= tol * scale and best[1] - best_dual <= tol * max(1.0, best[1]):
                status = "optimal"
                break
    zp, primal, resid = best
    res = DenoiseResult(zp, primal, best_dual, resid, it, status)
    return (res.z, res) if return_result else res.z
