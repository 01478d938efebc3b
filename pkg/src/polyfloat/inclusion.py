"""Empirical checks that a random polytope contains a multiple of ``(K_p)°``.

Two complementary tests are provided.  :func:`boundary_sweep` samples boundary
points ``t = r(theta) theta`` of the floating body and evaluates
``||Gamma t||_inf``: if it is at least ``c`` at every boundary point then
``absconv(X_1, ..., X_N)`` contains ``c (K_p)°``.  :func:`certify_points` goes
the other way and certifies individual points of ``c (K_p)°`` by an exact
ℓ1-quotient solve.

Both accept ``mode="one_sided"`` for the plain convex hull, where
``max_i <X_i, t>`` replaces ``||Gamma t||_inf`` and the one-sided quotient
norm replaces the symmetric one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bodies import (ConvHullUnion, Empirical, Intersection, LqBall, PolarBounds,
                     closed_form_floating_body, polar_radial, radial)
from .errors import ParameterError
from .l1opt import quotient_norm
from .samplers import DistributionSpec, projections, sample_matrix, sphere_directions, stable_quantile
from .seeding import derive_seed

SWEEP_PASS = ("evidence: no sampled boundary point violates the inclusion "
              "(a sampled necessary condition, not a proof)")
SWEEP_FAIL = ("disproof: a sampled boundary point has sup-norm below the threshold, "
              "so the inclusion fails at this scale on this realization")
CERT_PASS = ("evidence: every sampled point is certified inside the polytope "
             "(exact per-point certificates, sampled directions)")
CERT_FAIL = "disproof: at least one sampled point is certified outside the polytope"

_MODES = ("symmetric", "one_sided")


@dataclass
class InclusionReport:
    """Outcome of one inclusion test on one realization.

    ``passed`` is ``min_sup_norm >= threshold`` for a sweep and
    ``max_quotient <= 1 + tol`` for point certificates.  ``statement`` is a
    fixed sentence saying whether the outcome is evidence or a disproof.
    """

    mode: str  # "boundary_sweep" | "point_certificates"
    variant: str  # "symmetric" | "one_sided"
    M: int
    threshold: float
    passed: bool
    min_sup_norm: float = math.nan
    max_quotient: float = math.nan
    values: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    failing_directions: list = field(default_factory=list)
    approximate: bool = False
    notes: list = field(default_factory=list)

    @property
    def statement(self) -> str:
        if self.mode == "boundary_sweep":
            return SWEEP_PASS if self.passed else SWEEP_FAIL
        return CERT_PASS if self.passed else CERT_FAIL

    def to_dict(self):
        return {"mode": self.mode, "variant": self.variant, "M": self.M,
                "threshold": self.threshold, "pass": self.passed,
                "min_sup_norm": self.min_sup_norm, "max_quotient": self.max_quotient,
                "n_failing": len(self.failing_directions),
                "failing_directions": [list(map(float, d)) for d in self.failing_directions],
                "approximate": self.approximate, "notes": list(self.notes),
                "statement": self.statement}


def _check_mode(mode):
    if mode not in _MODES:
        raise ParameterError(f"mode must be one of {_MODES}, got {mode!r}")


def radials(body, thetas) -> np.ndarray:
    """Vectorized :func:`polyfloat.bodies.radial` over the rows of ``thetas``."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    if isinstance(body, LqBall):
        u = thetas / np.linalg.norm(thetas, axis=1, keepdims=True)
        if math.isinf(body.q):
            nq = np.max(np.abs(u), axis=1)
        else:
            nq = np.sum(np.abs(u) ** body.q, axis=1) ** (1.0 / body.q)
        return body.radius / nq
    if isinstance(body, ConvHullUnion):
        return np.max([radials(b, thetas) for b in body.members], axis=0)
    if isinstance(body, Intersection):
        return np.min([radials(b, thetas) for b in body.members], axis=0)
    return np.array([radial(body, th) for th in thetas])


def _directions(n, M, seed, directions):
    if directions is not None:
        d = np.atleast_2d(np.asarray(directions, dtype=float))
        if d.shape[1] != n:
            raise ParameterError(f"directions have dimension {d.shape[1]}, expected {n}")
        return d / np.linalg.norm(d, axis=1, keepdims=True)
    return sphere_directions(n, M, seed)


def _matrix(Gamma, n_expected=None):
    G = np.atleast_2d(np.asarray(Gamma, dtype=float))
    if n_expected is not None and G.shape[1] != n_expected:
        raise ParameterError(f"sample matrix has {G.shape[1]} columns, body has dimension {n_expected}")
    return G


def boundary_sweep(Gamma, body, M: int = 1000, threshold: float = 0.5, seed=0,
                   mode: str = "symmetric", directions=None) -> InclusionReport:
    """Minimum of ``||Gamma t||_inf`` over sampled boundary points of ``body``.

    Parameters
    ----------
    Gamma : (N, n) array
        Rows are the sample points ``X_i``.
    body : star body
        Typically a closed-form or estimated floating body.
    M : int
        Number of uniformly random sphere directions (ignored for
        ``Empirical`` bodies, which use their own direction table).
    threshold : float
        The scale ``c``; ``pass`` means ``min ||Gamma t||_inf >= c``.
    mode : ``"symmetric"`` or ``"one_sided"`` (``max_i <X_i, t>``).
    """
    _check_mode(mode)
    G = _matrix(Gamma, getattr(body, "dim", None))
    n = G.shape[1]
    notes = []
    if isinstance(body, Empirical):
        if directions is not None:
            notes.append("explicit directions ignored: used the empirical body's own direction table")
        else:
            notes.append("used the empirical body's own direction table")
        thetas, r = body.directions, body.radii.copy()
    else:
        thetas = _directions(n, M, seed, directions)
        r = radials(body, thetas)
    finite = np.isfinite(r)
    sup = np.full(len(thetas), math.inf)
    if np.any(finite):
        T = thetas[finite] * r[finite, None]
        vals = G @ T.T
        sup[finite] = np.max(np.abs(vals), axis=0) if mode == "symmetric" else np.max(vals, axis=0)
    fails = sup < threshold
    min_sup = float(sup.min()) if sup.size else math.inf
    return InclusionReport("boundary_sweep", mode, len(thetas), float(threshold),
                           bool(min_sup >= threshold), min_sup_norm=min_sup, values=sup,
                           failing_directions=[thetas[j] for j in np.flatnonzero(fails)],
                           notes=notes)


def certify_points(A, body, c: float = 0.5, M: int = 1000, seed=0, mode: str = "symmetric",
                   directions=None, tol: float = 1e-8) -> InclusionReport:
    """Certify sampled points ``u = c * rho_{body°}(psi) psi`` by quotient norm.

    ``A`` has the sample points as columns (``A = Gamma.T``).  A point passes
    when its quotient norm is at most ``1 + tol``; an infeasible solve is a
    certified failure.  Bodies without an exact polar radial use the lower end
    of the polar bracket and the report is flagged approximate.
    """
    _check_mode(mode)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[0]
    dim = getattr(body, "dim", None)
    if dim is not None and dim != n:
        raise ParameterError(f"A has {n} rows, body has dimension {dim}")
    psis = _directions(n, M, seed, directions)
    values = np.empty(len(psis))
    approximate = False
    failing = []
    for j, psi in enumerate(psis):
        pr = polar_radial(body, psi)
        if isinstance(pr, PolarBounds):
            approximate = True
            pr = pr.lower
        u = c * pr * psi
        if c == 0 or not np.any(u):
            values[j] = 0.0
            continue
        res = quotient_norm(A, u, mode)
        values[j] = res.value if res.status == "optimal" else math.inf
        if not values[j] <= 1.0 + tol:
            failing.append(psi)
    qmax = float(values.max()) if values.size else 0.0
    return InclusionReport("point_certificates", mode, len(psis), float(c),
                           bool(qmax <= 1.0 + tol), max_quotient=qmax, values=values,
                           failing_directions=failing, approximate=approximate)


@dataclass
class ChernoffReport:
    count: int
    bound: float
    premise_tail: float  # Monte Carlo estimate of P(<X, t> >= 1)
    premise_halfwidth: float
    premise_target: float  # exp(-p)

    @property
    def passed(self) -> bool:
        return self.count >= self.bound

    @property
    def premise_ok(self) -> bool:
        """Not confidently below ``exp(-p)``."""
        if math.isnan(self.premise_tail):
            return True
        return self.premise_tail + self.premise_halfwidth >= self.premise_target

    def to_dict(self):
        return {"count": self.count, "bound": self.bound, "pass": self.passed,
                "premise_tail": self.premise_tail, "premise_halfwidth": self.premise_halfwidth,
                "premise_target": self.premise_target, "premise_ok": self.premise_ok}


def chernoff_count(Gamma, t, p: float, spec: Optional[DistributionSpec] = None,
                   m: int = 100_000, seed=0, conf: float = 0.95) -> ChernoffReport:
    """Count rows with ``<X_i, t> >= 1`` and compare with ``(N/2) exp(-p)``.

    The premise ``P(<X, t> >= 1) >= exp(-p)`` is estimated from ``m`` fresh
    draws of ``spec`` when given, otherwise from the rows of ``Gamma``; the
    half-width is Hoeffding's at confidence ``conf``.
    """
    G = np.atleast_2d(np.asarray(Gamma, dtype=float))
    t = np.asarray(t, dtype=float)
    N = G.shape[0]
    count = int(np.count_nonzero(G @ t >= 1.0))
    bound = 0.5 * N * math.exp(-p)
    if spec is not None:
        s = projections(spec, t, m, seed)
        tail, k = float(np.mean(s >= 1.0)), m
    else:
        tail, k = count / N, N
    half = math.sqrt(math.log(2.0 / (1.0 - conf)) / (2.0 * k))
    return ChernoffReport(count, bound, tail, half, math.exp(-p))


def p_rule(alpha: float, N: int, n: int) -> float:
    """``p = alpha * log(e N / n)``."""
    return alpha * math.log(math.e * N / n)


def stable_body(q: float, n: int, p: float, m_quantile: int = 2_000_000, seed=0):
    """``K_p`` of the i.i.d. ``q``-stable vector: ``(1/Q) B_q`` with ``Q`` its quantile.

    Exact for ``q`` in {1, 2}; other ``q`` use a Monte Carlo quantile.
    """
    if q in (1.0, 2.0):
        return closed_form_floating_body(DistributionSpec.stable(q, n), p).body
    Q = stable_quantile(q, -math.expm1(-p), mode="monte-carlo", m=m_quantile, rng=seed)
    return LqBall(1.0 / Q, q, n)


@dataclass
class ScalingFit:
    """Log-log fit of the calibrated inclusion scale against ``N/n``."""

    q: float
    alpha: float
    n: int
    ratios: np.ndarray
    c_star: np.ndarray
    slope: float
    intercept: float
    residuals: np.ndarray
    raw_radius: np.ndarray  # c_star * polar radial, the Euclidean size of the points
    raw_slope: float
    monotone: bool
    trial_scales: np.ndarray = field(repr=False, default=None)
    notes: list = field(default_factory=list)

    @property
    def target(self) -> float:
        return self.alpha / self.q

    def to_dict(self):
        return {"q": self.q, "alpha": self.alpha, "n": self.n, "ratios": self.ratios,
                "c_star": self.c_star, "slope": self.slope, "intercept": self.intercept,
                "residuals": self.residuals, "raw_radius": self.raw_radius,
                "raw_slope": self.raw_slope, "monotone": self.monotone,
                "target_slope": self.target, "notes": list(self.notes)}


def largest_passing_scale(trial_scales, rate: float = 0.9) -> float:
    """Largest ``c`` with at least ``rate`` of the trials passing at scale ``c``.

    Trial ``k`` passes at every ``c <= trial_scales[k]`` because quotient
    norms are positively homogeneous.  The pass rate is therefore a monotone
    step function of ``c`` and its last admissible step is an order statistic,
    which is returned exactly instead of being bisected for.
    """
    s = np.sort(np.asarray(trial_scales, dtype=float))[::-1]
    need = max(1, math.ceil(rate * s.size - 1e-12))
    return float(s[need - 1])


def _fit(x, y):
    X = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return float(coef[1]), float(coef[0]), y - X @ coef


def scaling_trial_scales(q: float, alpha: float, ratio: float, trials: int, seed: int = 0,
                         n: int = 16, mode: str = "symmetric"):
    """Per-trial largest passing scales at one ratio, and the polar radial at ``e_i``.

    Trial ``t`` draws its matrix from ``derive_seed(seed, t, "scaling/<ratio>")``.
    """
    spec = DistributionSpec.gaussian(n) if q == 2.0 else DistributionSpec.stable(q, n)
    N = int(round(ratio * n))
    body = stable_body(q, n, p_rule(alpha, N, n), seed=seed)
    rho = float(polar_radial(body, np.eye(n)[0]))  # the same for every ±e_i
    signs = (1.0,) if mode == "symmetric" else (1.0, -1.0)  # symmetric: q(-e_i) = q(e_i)
    scales = np.empty(trials)
    for tr in range(trials):
        A = sample_matrix(spec, N, derive_seed(seed, tr, f"scaling/{float(ratio)}")).T
        worst = 0.0
        for i in range(n):
            for sg in signs:
                u = np.zeros(n)
                u[i] = sg * rho
                res = quotient_norm(A, u, mode)
                worst = max(worst, res.value if res.status == "optimal" else math.inf)
        scales[tr] = 1.0 / worst if worst > 0 else math.inf
    return scales, rho


def scaling_exponent_fit(q: float, alpha: float, ratios: Sequence[float], trials: int = 20,
                         seed: int = 0, n: int = 16, rate: float = 0.9,
                         mode: str = "symmetric") -> ScalingFit:
    """Exponent of the calibrated inclusion scale ``c*`` as a function of ``N/n``.

    For each ratio, ``N = ratio * n`` points of the i.i.d. ``q``-stable vector
    (``q = 2`` is the Gaussian control) are drawn per trial and the floating
    body ``K_p`` with ``p = alpha log(eN/n)`` is formed.  A trial passes at
    scale ``c`` when :func:`certify_points` accepts the ``2n`` points
    ``c * rho_{K_p°}(±e_i) (±e_i)``; ``c*`` is the largest scale at which at
    least ``rate`` of the trials pass.  ``log c*`` is then fitted against
    ``log(N/n)`` by least squares.

    Returns
    -------
    ScalingFit
        Also carries the Euclidean radius ``c* rho(e_i)`` of the certified
        points and its own slope, for comparison.
    """
    _check_mode(mode)
    if not 1.0 <= q <= 2.0:
        raise ParameterError(f"q must lie in [1, 2], got {q}")
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    ratios = np.asarray(sorted(float(r) for r in ratios))
    if np.unique(ratios).size < 2:
        raise ParameterError("a slope needs at least two distinct ratios")
    notes = []
    if ratios.size < 4 or ratios[-1] / ratios[0] < 10.0:
        notes.append("underpowered design: fewer than 4 ratios or a span below one decade")
    c_star, raw, scales_all = [], [], []
    for ratio in ratios:
        scales, rho = scaling_trial_scales(q, alpha, ratio, trials, seed, n, mode)
        cs = largest_passing_scale(scales, rate)
        c_star.append(cs)
        raw.append(cs * rho)
        scales_all.append(scales)
    c_star = np.array(c_star)
    raw = np.array(raw)
    x = np.log(ratios)
    slope, intercept, resid = _fit(x, np.log(c_star))
    raw_slope, _, _ = _fit(x, np.log(raw))
    monotone = bool(np.all(np.diff(c_star) >= 0) or np.all(np.diff(c_star) <= 0))
    if not monotone:
        notes.append("c* is not monotone in N/n")
    return ScalingFit(q, alpha, n, ratios, c_star, slope, intercept, resid, raw, raw_slope,
                      monotone, np.array(scales_all), notes)
