"""Sparse-recovery lab: NSP constants, quotient constants, noise-blind trials."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import null_space

from .bodies import Empirical, support, support_bounds
from .errors import BudgetError, ParameterError, SolverError, UnsupportedError
from .l1opt import basis_pursuit, bp_denoise, lp_solve, quotient_norm
from .samplers import DistributionSpec, sample_matrix, sphere_directions
from .seeding import derive_seed

NSP_BUDGET = 100_000
RANK_TOL = 1e-10


def sparse_approx_error(x, s: int) -> float:
    """``sigma_s(x)_1``: the sum of the ``N - s`` smallest magnitudes of ``x``."""
    a = np.sort(np.abs(np.asarray(x, dtype=float).ravel()))
    N = a.size
    if not 0 <= s <= N:
        raise ParameterError(f"s must lie in [0, {N}], got {s}")
    return float(a[:N - s].sum())


def nsp_lp_count(N: int, s: int) -> int:
    """Work estimate ``C(N, s) 2^s`` used by the budget guard."""
    return math.comb(N, s) * 2 ** s


@dataclass
class NSPResult:
    """Null space constant ``rho = max_{v in ker A, |S| = s} ||v_S||_1 / ||v_{S^c}||_1``.

    ``witness`` is a kernel vector attaining ``rho`` on ``support`` (for
    ``rho = inf`` it vanishes off the support).  ``lp_count`` is the number
    of LPs actually solved; sign patterns ``sigma`` and ``-sigma`` give the
    same value, so only half of them are enumerated.
    """

    rho: float
    s: int
    support: Optional[tuple]
    witness: Optional[np.ndarray]
    lp_count: int
    kernel_dim: int

    def to_dict(self):
        return {"rho": self.rho, "s": self.s, "support": self.support,
                "lp_count": self.lp_count, "kernel_dim": self.kernel_dim}


def _nsp_lp(K, S, Sc, sigma):
    """max sigma^T (K c)_S  s.t. ||(K c)_{S^c}||_1 <= 1; return (value, c) or (inf, None)."""
    k = K.shape[1]
    nc = len(Sc)
    # variables: c+ (k), c- (k), a (nc), b (nc), slack (1)
    KS, KSc = K[S], K[Sc]
    obj_c = -(sigma @ KS)
    c = np.concatenate([obj_c, -obj_c, np.zeros(2 * nc + 1)])
    A = np.zeros((nc + 1, 2 * k + 2 * nc + 1))
    A[:nc, :k] = KSc
    A[:nc, k:2 * k] = -KSc
    A[:nc, 2 * k:2 * k + nc] = -np.eye(nc)
    A[:nc, 2 * k + nc:2 * k + 2 * nc] = np.eye(nc)
    A[nc, 2 * k:] = 1.0
    b = np.zeros(nc + 1)
    b[nc] = 1.0
    res = lp_solve(c, A, b)
    if res.status == "unbounded":
        return math.inf, None
    if res.status != "optimal":
        raise SolverError(f"NSP LP ended with status {res.status}", res)
    coef = res.x[:k] - res.x[k:2 * k]
    return -res.fun, coef


def nsp_constant(A, s: int, budget: int = NSP_BUDGET, rank_tol: float = RANK_TOL) -> NSPResult:
    """Exact null space constant of order ``s`` by enumerating supports and signs.

    Raises
    ------
    BudgetError
        When ``C(N, s) 2^s`` exceeds ``budget``; the estimate is attached.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    N = A.shape[1]
    if not 1 <= s <= N:
        raise ParameterError(f"s must lie in [1, {N}], got {s}")
    est = nsp_lp_count(N, s)
    if est > budget:
        raise BudgetError(f"NSP enumeration needs about {est} LPs, budget is {budget}", est)
    K = null_space(A, rcond=rank_tol)
    kdim = K.shape[1]
    if kdim == 0:
        return NSPResult(0.0, s, None, None, 0, 0)
    best, best_S, best_v, count = -math.inf, None, None, 0
    for S in itertools.combinations(range(N), s):
        S = list(S)
        Sc = [i for i in range(N) if i not in S]
        if np.linalg.matrix_rank(K[Sc], tol=rank_tol) < kdim:
            # some kernel vector vanishes off S
            if len(Sc) == 0:
                v = K[:, 0]
            else:
                v = K @ null_space(K[Sc], rcond=rank_tol)[:, 0]
            return NSPResult(math.inf, s, tuple(S), v, count, kdim)
        for tail in itertools.product((1.0, -1.0), repeat=s - 1):
            sigma = np.array((1.0,) + tail)
            val, coef = _nsp_lp(K, S, Sc, sigma)
            count += 1
            if val == math.inf:
                return NSPResult(math.inf, s, tuple(S), None, count, kdim)
            if val > best + 1e-12:
                best, best_S, best_v = val, tuple(S), K @ coef
    return NSPResult(float(best), s, best_S, best_v, count, kdim)


def nsp_error_constant(rho: float) -> float:
    """``2(1 + rho)/(1 - rho)``; infinite for ``rho >= 1``."""
    return 2.0 * (1.0 + rho) / (1.0 - rho) if rho < 1 else math.inf


def polar_gauge(body, w):
    """``|||w|||``: gauge of ``body°`` at ``w``, i.e. the support of ``conv(body)``.

    Returns ``(value, approximate)``.  Empirical bodies use the table's lower
    support bound, which overstates ratios ``q(w) / |||w|||``.
    """
    try:
        return float(support(body, w)), False
    except UnsupportedError:
        lo, _ = support_bounds(body, w)
        return float(lo), True


@dataclass
class QuotientConstant:
    d_hat: float
    worst_direction: np.ndarray
    ratios: np.ndarray = field(repr=False)
    approximate: bool = False
    witness: Optional[np.ndarray] = None  # w with an infeasible solve

    def to_dict(self):
        return {"d_hat": self.d_hat, "worst_direction": self.worst_direction,
                "approximate": self.approximate, "M": int(self.ratios.size)}


def quotient_constant(A, body, M: int = 200, seed=0, scale: float = 1.0,
                      directions=None) -> QuotientConstant:
    """``d_hat = max_w q(w) / |||w|||`` over ``M`` sampled sphere directions scaled by ``scale``.

    By homogeneity ``d_hat`` does not depend on ``scale``.  An infeasible
    solve gives ``d_hat = inf`` with the offending ``w`` as witness.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[0]
    W = sphere_directions(n, M, seed) if directions is None else np.atleast_2d(
        np.asarray(directions, dtype=float))
    W = scale * W / np.linalg.norm(W, axis=1, keepdims=True)
    ratios = np.empty(len(W))
    approx = isinstance(body, Empirical)
    for j, w in enumerate(W):
        g, a = polar_gauge(body, w)
        approx = approx or a
        res = quotient_norm(A, w)
        if res.status != "optimal":
            ratios[j] = math.inf
            return QuotientConstant(math.inf, w / np.linalg.norm(w), ratios[:j + 1], approx, w)
        ratios[j] = res.value / g if g > 0 else math.inf
    j = int(np.argmax(ratios))
    return QuotientConstant(float(ratios[j]), W[j] / np.linalg.norm(W[j]), ratios, approx)


@dataclass
class RecoveryReport:
    """One recovery trial.  ``empirical_C`` is ``nan`` when its denominator is 0."""

    x: np.ndarray = field(repr=False)
    x_sharp: np.ndarray = field(repr=False)
    err_l1: float
    sigma_s: float
    noise_norm: float  # |||w||| when a body is given, else nan
    noise_l2: float
    s: int
    mode: str  # "blind" | "informed"
    eta: Optional[float] = None
    bound_value: float = math.nan  # 2(1+rho)/(1-rho) sigma_s when rho is given
    rho: Optional[float] = None
    n: int = 0

    @property
    def empirical_C(self) -> float:
        return _ratio(self.err_l1, self.sigma_s + self.noise_norm)

    @property
    def empirical_C_l2(self) -> float:
        """``err / (sigma_s + ||w||_2 sqrt(s/n))``."""
        return _ratio(self.err_l1, self.sigma_s + self.noise_l2 * math.sqrt(self.s / self.n))

    def to_dict(self):
        return {"mode": self.mode, "eta": self.eta, "err_l1": self.err_l1, "sigma_s": self.sigma_s,
                "noise_norm": self.noise_norm, "noise_l2": self.noise_l2, "s": self.s,
                "empirical_C": self.empirical_C, "empirical_C_l2": self.empirical_C_l2,
                "bound_value": self.bound_value, "rho": self.rho}


def _ratio(num, den, tol=1e-6):
    if not den > 0:
        return math.nan if num <= tol else math.inf
    return num / den


def run_recovery_trial(A, x, w, mode: str = "blind", eta: Optional[float] = None, s: Optional[int] = None,
                       body=None, rho: Optional[float] = None, tol: float = 1e-8) -> RecoveryReport:
    """Recover ``x`` from ``A x + w`` by basis pursuit (blind) or ``bp_denoise`` (informed).

    ``s`` defaults to the support size of ``x``.  ``body`` (a floating body)
    enables the geometric noise norm ``|||w|||``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    x = np.asarray(x, dtype=float).ravel()
    w = np.asarray(w, dtype=float).ravel()
    n, N = A.shape
    if x.size != N or w.size != n:
        raise ParameterError(f"shapes: A is {A.shape}, x has {x.size}, w has {w.size}")
    if s is None:
        s = int(np.count_nonzero(x))
    y = A @ x + w
    if mode == "blind":
        try:
            xs = basis_pursuit(A, y, tol)
        except SolverError as exc:
            raise SolverError(f"blind recovery failed (n={n}, N={N}, s={s}): {exc}", exc.result) from exc
    elif mode == "informed":
        if eta is None:
            raise ParameterError("informed mode requires eta")
        xs = bp_denoise(A, y, eta)
    else:
        raise ParameterError(f"mode must be 'blind' or 'informed', got {mode!r}")
    sig = sparse_approx_error(x, s)
    nn = polar_gauge(body, w)[0] if body is not None else math.nan
    bound = nsp_error_constant(rho) * sig if rho is not None else math.nan
    return RecoveryReport(x, xs, float(np.abs(xs - x).sum()), sig, nn, float(np.linalg.norm(w)), s,
                          mode, eta, bound, rho, n)


def sparse_signal(N: int, s: int, gen: np.random.Generator) -> np.ndarray:
    """Exactly ``s``-sparse vector with a uniform support and standard Gaussian entries."""
    x = np.zeros(N)
    idx = gen.choice(N, size=s, replace=False)
    x[idx] = gen.standard_normal(s)
    return x


RECOVERY_COLUMNS = ("trial", "noise_level", "mode", "err_l1", "sigma_s", "noise_l2", "C")


def recovery_experiment(spec: DistributionSpec, n: int, s: int, noise_levels: Sequence[float],
                        trials: int, seed: int = 0, noise: str = "isotropic", mode: str = "blind",
                        start: int = 0):
    """Rows of a noise-blind (or informed, ``eta = ||w||``) recovery experiment.

    ``spec`` describes one row of ``A`` (dimension ``N``).  Each trial draws
    one matrix, one signal and one unit noise direction and reuses them at
    every noise level, so levels are compared on the same instance.
    ``noise="isotropic"`` draws the direction uniformly per trial;
    ``"adversarial"`` uses one fixed direction for all trials.
    """
    if noise not in ("isotropic", "adversarial"):
        raise ParameterError(f"noise must be 'isotropic' or 'adversarial', got {noise!r}")
    N = spec.dim
    fixed = sphere_directions(n, 1, derive_seed(seed, 0, "recovery/noise-direction"))[0]
    rows = []
    for t in range(start, start + trials):
        A = sample_matrix(spec, n, derive_seed(seed, t, "recovery/matrix"))
        x = sparse_signal(N, s, derive_seed(seed, t, "recovery/signal").generator())
        u = fixed if noise == "adversarial" else sphere_directions(
            n, 1, derive_seed(seed, t, "recovery/noise"))[0]
        for level in noise_levels:
            w = float(level) * u
            rep = run_recovery_trial(A, x, w, mode, eta=float(level) if mode == "informed" else None, s=s)
            rows.append({"trial": t, "noise_level": float(level), "mode": mode, "err_l1": rep.err_l1,
                         "sigma_s": rep.sigma_s, "noise_l2": rep.noise_l2, "C": rep.empirical_C_l2})
    return rows


def summarize_recovery(rows, levels=None):
    """Per-level medians, the 95th-percentile constant and the monotonicity flag."""
    levels = sorted({r["noise_level"] for r in rows}) if levels is None else list(levels)
    med = [float(np.median([r["err_l1"] for r in rows if r["noise_level"] == lv])) for lv in levels]
    Cs = np.array([r["C"] for r in rows], dtype=float)
    Cs = Cs[~np.isnan(Cs)]
    c95 = float(np.percentile(Cs, 95, method="higher")) if Cs.size else math.nan
    return {"levels": levels, "median_err": med, "C95": c95,
            "monotone": bool(np.all(np.diff(med) >= 0)),
            "C_defined": int(Cs.size)}
