"""Dense two-phase revised simplex.

Pricing is Dantzig's most-negative reduced cost.  After a run of
``DEGENERATE_RUN`` degenerate pivots Bland's smallest-index rule takes over
until the next nondegenerate pivot (``pricing="bland"`` uses it throughout).
Bland's rule cannot cycle inside a degenerate stretch and every nondegenerate
pivot strictly lowers the objective, so no basis repeats.

The basis inverse is kept explicitly, updated by a rank-one pivot and
recomputed from scratch every ``REFACTOR_EVERY`` pivots.  The ratio test is
exact.  Under Dantzig pricing an entering column whose leaving pivot is tiny
relative to the rest of its column is passed over for the next-best reduced
cost (up to ``ENTER_TRIES`` candidates), which keeps the basis well
conditioned on heavy-tailed data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

REFACTOR_EVERY = 50
DEGENERATE_RUN = 25
PIVOT_TOL = 1e-9
REL_PIVOT_TOL = 1e-7
ENTER_TRIES = 8
PERTURB = 1e-7
PERTURB_FEAS = 1e-9


@dataclass
class LPResult:
    """Outcome of :func:`lp_solve`.

    ``y`` holds the equality-row duals, so at an optimum ``c - A_eq.T @ y``
    is nonnegative on variables at their lower bounds (standard form).
    """

    status: str  # "optimal" | "infeasible" | "unbounded" | "iteration-limit"
    x: Optional[np.ndarray]
    fun: float
    y: Optional[np.ndarray]
    nit: int
    basis: Optional[np.ndarray] = None
    slackness: float = math.nan

    @property
    def success(self) -> bool:
        return self.status == "optimal"

    def to_dict(self):
        return {"status": self.status, "value": self.fun, "iterations": self.nit,
                "complementary_slackness": self.slackness}


class _Revised:
    def __init__(self, A, b, basis, tol, pricing, perturb=False):
        self.A = A
        self.b = b
        self.perturb = perturb
        self.perturbed = False
        self.basis = np.array(basis, dtype=int)
        self.tol = tol
        self.bland_only = pricing == "bland"
        self.bland = self.bland_only
        self.nit = 0
        self.refactor()

    def refactor(self):
        self.Binv = np.linalg.inv(self.A[:, self.basis])
        self.xB = self.Binv @ self.b
        self.xB[np.abs(self.xB) < 1e-13] = 0.0
        self._since = 0

    def _perturb(self):
        # lift every basic value by a small distinct amount; b changes consistently
        gen = np.random.default_rng(len(self.basis))
        delta = PERTURB * (1.0 + np.abs(self.xB)) * gen.uniform(0.5, 1.0, self.xB.size)
        self.b = self.b + self.A[:, self.basis] @ delta
        self.xB = self.xB + delta
        self.perturbed = True

    def restore(self, b):
        """Drop the perturbation; return whether the basis stays primal feasible."""
        self.b = b
        self.perturbed = False
        self.refactor()
        ok = bool(np.all(self.xB >= -PERTURB_FEAS * (1.0 + np.max(np.abs(b), initial=0.0))))
        self.xB = np.maximum(self.xB, 0.0)
        return ok

    def duals(self, c):
        return c[self.basis] @ self.Binv

    def _leaving(self, col):
        """Leaving row and step for entering column ``col``; ``None`` if unbounded.

        Near-ties are judged by what the step leaves behind (at most 1e-12
        relative), not by the ratios themselves, so a large pivot entry cannot
        hide a row that the step would drive negative.  Dantzig mode prefers
        the largest pivot among ties, Bland mode the smallest basic index.
        """
        pos = np.flatnonzero(col > PIVOT_TOL)
        if pos.size == 0:
            return None
        xb = np.maximum(self.xB[pos], 0.0)
        tmin = float((xb / col[pos]).min())
        ties = pos[xb - tmin * col[pos] <= 1e-12 * (1.0 + xb)]
        r = ties[np.argmin(self.basis[ties])] if self.bland else ties[np.argmax(col[ties])]
        return int(r), tmin

    def pivot(self, r, j, col, theta=None):
        if theta is None:
            theta = max(self.xB[r], 0.0) / col[r]
        self.xB -= theta * col
        self.xB[r] = theta
        self.basis[r] = j
        pr = self.Binv[r] / col[r]
        self.Binv -= np.outer(col, pr)
        self.Binv[r] = pr
        self._since += 1
        if self._since >= REFACTOR_EVERY:
            self.refactor()

    def run(self, c, allowed, max_iter, floor=None):
        """Iterate to optimality over the ``allowed`` columns; return a status.

        ``floor`` is a known lower bound on the objective; reaching it ends the
        run as optimal (used by phase 1, whose objective is nonnegative).
        """
        degenerate = 0
        scale = max(1.0, float(np.max(np.abs(c[allowed]), initial=0.0)))
        tol_d = self.tol * scale
        idx = np.flatnonzero(allowed)
        A_allowed = self.A[:, idx]
        c_allowed = c[idx]
        while True:
            if floor is not None and c[self.basis] @ np.maximum(self.xB, 0.0) <= floor:
                return "optimal"
            if self.nit >= max_iter:
                return "iteration-limit"
            y = self.duals(c)
            d = c_allowed - y @ A_allowed
            d[np.isin(idx, self.basis, assume_unique=False)] = 0.0
            if self.bland:
                neg = np.flatnonzero(d < -tol_d)
                if neg.size == 0:
                    return "optimal"
                order = neg[:1]
            else:
                order = np.argsort(d)[:ENTER_TRIES]
                order = order[d[order] < -tol_d]
                if order.size == 0:
                    return "optimal"
            best = None
            for jj in order:
                j = int(idx[jj])
                col = self.Binv @ self.A[:, j]
                leave = self._leaving(col)
                if leave is None:
                    return "unbounded"
                rel = col[leave[0]] / np.max(np.abs(col))
                if best is None or rel > best[0]:
                    best = (rel, j, col, leave)
                if rel >= REL_PIVOT_TOL:
                    break
            _, j, col, (r, tmin) = best
            if tmin <= 1e-12:
                degenerate += 1
                if degenerate >= DEGENERATE_RUN:
                    if self.perturb and not self.perturbed:
                        self._perturb()
                        degenerate = 0
                    else:
                        self.bland = True
            else:
                degenerate = 0
                self.bland = self.bland_only
            self.pivot(r, j, col, tmin)
            self.nit += 1


def _standard_form(c, A, b, tol=1e-9, max_iter=None, pricing="dantzig", tol_feas=1e-8):
    """Solve ``min c.x  s.t.  A x = b, x >= 0``; return an :class:`LPResult`."""
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    m, k = A.shape
    if max_iter is None:
        max_iter = max(10_000, 50 * (m + k))
    if m == 0:
        if np.any(c < -tol):
            return LPResult("unbounded", None, -math.inf, np.zeros(0), 0)
        return LPResult("optimal", np.zeros(k), 0.0, np.zeros(0), 0, np.zeros(0, int), 0.0)
    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign

    # phase 1 on [A | I]
    Aext = np.hstack([A, np.eye(m)])
    c1 = np.concatenate([np.zeros(k), np.ones(m)])
    solver = _Revised(Aext, b, np.arange(k, k + m), tol, pricing)
    status = solver.run(c1, np.ones(k + m, dtype=bool), max_iter,
                        floor=0.1 * tol_feas * max(1.0, float(np.max(np.abs(b)))))
    if status == "iteration-limit":
        return LPResult(status, None, math.nan, None, solver.nit)
    infeas = float(c1[solver.basis] @ np.maximum(solver.xB, 0.0))
    if infeas > tol_feas * max(1.0, float(np.max(np.abs(b)))):
        return LPResult("infeasible", None, math.nan, None, solver.nit)

    # drive zero-level artificials out of the basis; drop redundant rows
    redundant = []
    for r in range(m):
        if solver.basis[r] < k:
            continue
        row = solver.Binv[r] @ A
        row[solver.basis[solver.basis < k]] = 0.0
        cand = np.flatnonzero(np.abs(row) > 1e-7 * max(1.0, np.max(np.abs(row), initial=0.0)))
        if cand.size:
            j = int(cand[0])
            solver.xB[r] = 0.0  # below tolerance; a step here would scale by 1/pivot
            solver.pivot(r, j, solver.Binv @ Aext[:, j])
        else:
            redundant.append(int(solver.basis[r] - k))
    keep = np.setdiff1d(np.arange(m), redundant)
    basis = solver.basis[solver.basis < k]
    nit = solver.nit

    solver = _Revised(A[keep], b[keep], basis, tol, pricing, perturb=pricing != "bland")
    solver.nit = nit
    status = solver.run(c, np.ones(k, dtype=bool), max_iter)
    if solver.perturbed and not solver.restore(b[keep]):
        # the perturbed optimum is infeasible for the true data: redo without perturbation
        solver = _Revised(A[keep], b[keep], basis, tol, pricing)
        solver.nit = nit
        status = solver.run(c, np.ones(k, dtype=bool), max_iter)
    if status != "optimal":
        return LPResult(status, None, -math.inf if status == "unbounded" else math.nan, None, solver.nit)
    x = np.zeros(k)
    x[solver.basis] = np.maximum(solver.xB, 0.0)
    y = np.zeros(m)
    y[keep] = solver.duals(c)
    y *= sign
    d = c - (y * sign) @ A
    slack = float(np.abs(x * d).sum())
    return LPResult("optimal", x, float(c @ x), y, solver.nit, solver.basis.copy(), slack)


def _normalize_bounds(bounds, k):
    if bounds is None:
        return [(0.0, None)] * k
    if isinstance(bounds, tuple) and len(bounds) == 2 and not isinstance(bounds[0], (tuple, list)):
        return [bounds] * k
    bounds = list(bounds)
    if len(bounds) != k:
        raise ValueError(f"expected {k} bounds, got {len(bounds)}")
    return bounds


def lp_solve(c, A_eq, b_eq, bounds=None, tol: float = 1e-9, max_iter: Optional[int] = None,
             pricing: str = "dantzig") -> LPResult:
    """Minimise ``c.x`` subject to ``A_eq x = b_eq`` and variable bounds.

    Parameters
    ----------
    c : (k,) array
    A_eq : (m, k) array
    b_eq : (m,) array
    bounds : sequence of ``(lo, hi)`` pairs, one pair for all variables, or
        None for ``x >= 0``.  ``None`` entries mean unbounded on that side.
    tol : reduced-cost optimality tolerance (relative to ``max|c|``).
    pricing : ``"dantzig"`` (with Bland fallback) or ``"bland"``.

    Returns
    -------
    LPResult
        ``y`` are the duals of the equality rows.
    """
    c = np.asarray(c, dtype=float).ravel()
    k = c.size
    A_eq = np.asarray(A_eq, dtype=float).reshape(-1, k)
    b_eq = np.asarray(b_eq, dtype=float).ravel()
    if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A_eq)) and np.all(np.isfinite(b_eq))):
        raise ValueError("LP data must be finite")
    bounds = _normalize_bounds(bounds, k)

    # map x = shift + T @ z with z >= 0; finite upper bounds become extra rows
    cols, shift = [], np.zeros(k)
    extra_rows = []
    for j, (lo, hi) in enumerate(bounds):
        lo = None if lo is None or lo == -math.inf else float(lo)
        hi = None if hi is None or hi == math.inf else float(hi)
        if lo is not None:
            shift[j] = lo
            cols.append((j, 1.0))
            if hi is not None:
                if hi < lo:
                    return LPResult("infeasible", None, math.nan, None, 0)
                extra_rows.append((len(cols) - 1, hi - lo))
        elif hi is not None:
            shift[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    nz = len(cols)
    T = np.zeros((k, nz))
    for i, (j, s) in enumerate(cols):
        T[j, i] = s
    n_ub = len(extra_rows)
    A_std = np.zeros((A_eq.shape[0] + n_ub, nz + n_ub))
    A_std[:A_eq.shape[0], :nz] = A_eq @ T
    b_std = np.concatenate([b_eq - A_eq @ shift, np.zeros(n_ub)])
    for r, (i, width) in enumerate(extra_rows):
        A_std[A_eq.shape[0] + r, i] = 1.0
        A_std[A_eq.shape[0] + r, nz + r] = 1.0
        b_std[A_eq.shape[0] + r] = width
    c_std = np.concatenate([c @ T, np.zeros(n_ub)])
    res = _standard_form(c_std, A_std, b_std, tol=tol, max_iter=max_iter, pricing=pricing)
    if res.status != "optimal":
        return res
    x = shift + T @ res.x[:nz]
    return LPResult("optimal", x, float(c @ x), res.y[:A_eq.shape[0]], res.nit, res.basis, res.slackness)
