"""Empirical constants of the small-ball and L_r conditions, regularity, domination.

All confidence statements use Hoeffding's inequality at level 95% per
comparison, with a Bonferroni split across the comparisons of one report.
Violations are reported only when the two compared intervals are separated.
Every direction ``j`` is sampled from its own stream ``row_stream(seed, j)``,
so estimates with the same seed share samples (which makes monotonicity in
``gamma`` or ``r`` exact rather than approximate).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bodies import lq_norm
from .errors import MomentError, ParameterError, PreconditionError
from .floating import _check_m, lp_norm_band, radial_band
from .samplers import DistributionSpec, projections, row_stream, sphere_directions

LEVEL = 0.05


def hoeffding_halfwidth(m: int, comparisons: int = 1, level: float = LEVEL) -> float:
    """Two-sided Hoeffding half-width for a mean of ``m`` indicators."""
    return math.sqrt(math.log(2.0 * comparisons / level) / (2.0 * m))


def default_directions(n: int, seed=0, M: int = 200) -> np.ndarray:
    """``M`` uniform sphere directions followed by the ``2n`` signed axes."""
    eye = np.eye(n)
    return np.vstack([sphere_directions(n, M, seed), eye, -eye])


def _prepare(directions, n, q, seed):
    d = default_directions(n, seed) if directions is None else np.atleast_2d(np.asarray(directions, dtype=float))
    if d.shape[1] != n:
        raise ParameterError(f"directions have dimension {d.shape[1]}, expected {n}")
    norms = np.array([lq_norm(t, q) for t in d])
    if np.any(norms == 0):
        raise ParameterError("zero direction")
    return d / norms[:, None]


def _samples(spec, d, m, seed, j):
    return projections(spec, d[j], m, row_stream(seed, j))


@dataclass
class ConstantEstimate:
    """Worst-case constant over a direction grid."""

    name: str
    value: float
    worst_direction: np.ndarray
    per_direction: np.ndarray = field(repr=False)
    halfwidth: float = math.nan
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "value": self.value, "halfwidth": self.halfwidth,
                "worst_direction": self.worst_direction, "details": self.details}


def estimate_small_ball(spec: DistributionSpec, norm_q: float = 2.0, gamma: float = 1.0,
                        directions=None, m: int = 100_000, seed=0) -> ConstantEstimate:
    """``delta_hat = min_t P(|<X,t>| >= gamma ||t||)`` over unit directions (in ``||.||_q``)."""
    if not gamma >= 0:
        raise ParameterError(f"gamma must be >= 0, got {gamma}")
    d = _prepare(directions, spec.dim, norm_q, seed)
    freq = np.array([np.mean(np.abs(_samples(spec, d, m, seed, j)) >= gamma) for j in range(len(d))])
    j = int(np.argmin(freq))
    return ConstantEstimate("small_ball_delta", float(freq[j]), d[j], freq,
                            hoeffding_halfwidth(m, len(d)),
                            {"gamma": gamma, "norm_q": norm_q, "m": m, "directions": len(d)})


def estimate_Lr(spec: DistributionSpec, norm_q: float = 2.0, r: float = 2.0, directions=None,
                m: int = 100_000, seed=0) -> ConstantEstimate:
    """``L_hat = max_t ||<X,t>||_{L_r} / ||t||`` over the direction grid."""
    if not r > 0:
        raise ParameterError(f"r must be > 0, got {r}")
    if r >= spec.moment_barrier:
        raise MomentError(f"E|<X,t>|^{r} is infinite: {spec.family} has moments only below order "
                          f"{spec.moment_barrier}")
    d = _prepare(directions, spec.dim, norm_q, seed)
    bands = np.array([lp_norm_band(_samples(spec, d, m, seed, j), r) for j in range(len(d))])
    j = int(np.argmax(bands[:, 1]))
    return ConstantEstimate("Lr_constant", float(bands[j, 1]), d[j], bands[:, 1],
                            float(bands[j, 2] - bands[j, 1]),
                            {"r": r, "norm_q": norm_q, "m": m, "directions": len(d),
                             "band_lower": bands[:, 0], "band_upper": bands[:, 2]})


def regularity_constant(spec: DistributionSpec, q_grid: Sequence[float] = (1.0, 2.0, 4.0),
                        directions=None, m: int = 100_000, seed=0) -> ConstantEstimate:
    """``D_hat = max ||<X,t>||_{2q} / ||<X,t>||_q`` over directions and ``q`` in the grid."""
    q_grid = [float(q) for q in q_grid]
    for q in q_grid:
        if not q > 0:
            raise ParameterError(f"q must be > 0, got {q}")
        if 2 * q >= spec.moment_barrier:
            raise MomentError(f"q={q}: the moment of order 2q={2 * q} is infinite for {spec.family}")
    d = _prepare(directions, spec.dim, 2.0, seed)
    ratios = np.empty((len(d), len(q_grid)))
    for j in range(len(d)):
        a = np.abs(_samples(spec, d, m, seed, j))
        for k, q in enumerate(q_grid):
            ratios[j, k] = np.mean(a ** (2 * q)) ** (1 / (2 * q)) / np.mean(a ** q) ** (1 / q)
    j, k = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
    return ConstantEstimate("regularity_D", float(ratios[j, k]), d[j], ratios.max(axis=1),
                            details={"q_grid": q_grid, "worst_q": q_grid[k], "m": m,
                                     "ratios": ratios})


def polarity_chain(spec: DistributionSpec, r: float, gamma: float, delta: float, L: float,
                   directions=None, m: int = 100_000, seed=0, conf: float = 0.95):
    """Direction-wise check of ``(1/L) B ⊆ B(L_r(X)) ⊆ 1/(gamma delta^(1/r)) B``.

    Returns the list of confident violations as ``(direction, band, bounds)``
    tuples, where ``band`` brackets the radial ``1 / ||<X,theta>||_{L_r}``.
    The Euclidean norm is the reference norm.
    """
    if r >= spec.moment_barrier:
        raise MomentError(f"moment of order {r} is infinite for {spec.family}")
    d = _prepare(directions, spec.dim, 2.0, seed)
    lo_bound, hi_bound = 1.0 / L, 1.0 / (gamma * delta ** (1.0 / r))
    bad = []
    for j in range(len(d)):
        nlo, _, nhi = lp_norm_band(_samples(spec, d, m, seed, j), r, conf)
        rlo, rhi = 1.0 / nhi, (1.0 / nlo if nlo > 0 else math.inf)
        if rhi < lo_bound or rlo > hi_bound:
            bad.append((d[j], (rlo, rhi), (lo_bound, hi_bound)))
    return bad


@dataclass
class DominationReport:
    lambda1: float
    lambda2: float
    comparisons: int
    halfwidth: float
    violations: list  # (direction, u, pX, pY)
    max_deficit: float  # max of lambda1*pY - pX over the grid (point estimates)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self):
        return {"lambda1": self.lambda1, "lambda2": self.lambda2, "comparisons": self.comparisons,
                "halfwidth": self.halfwidth, "n_violations": len(self.violations),
                "violations": [{"direction": v[0], "u": v[1], "pX": v[2], "pY": v[3]}
                               for v in self.violations],
                "max_deficit": self.max_deficit, "ok": self.ok}


def domination_check(specX: DistributionSpec, specY: DistributionSpec, lambda1: float,
                     lambda2: float, directions=None, u_grid: Sequence[float] = (0.5, 1.0, 1.5, 2.0, 3.0),
                     m: int = 100_000, seed=0) -> DominationReport:
    """Empirical check of ``P(<X,t> >= u) >= lambda1 P(<Y,t> >= lambda2 u)``.

    ``X`` and ``Y`` are sampled independently (``Y`` uses the seed offset by
    one stream family).  A violation is reported when the upper Hoeffding
    bound for the left side lies below ``lambda1`` times the lower bound for
    the right side.
    """
    if not 0 < lambda1 <= 1:
        raise ParameterError(f"lambda1 must lie in (0, 1], got {lambda1}")
    if not lambda2 > 0:
        raise ParameterError(f"lambda2 must be > 0, got {lambda2}")
    if specX.dim != specY.dim:
        raise ParameterError("X and Y must have the same dimension")
    d = _prepare(directions, specX.dim, 2.0, seed)
    u_grid = np.asarray(u_grid, dtype=float)
    K = len(d) * len(u_grid)
    h = hoeffding_halfwidth(m, 2 * K)
    seedY = row_stream(seed, 1 << 40)
    viol, deficit = [], -math.inf
    for j in range(len(d)):
        sx = np.sort(_samples(specX, d, m, seed, j))
        sy = np.sort(projections(specY, d[j], m, seedY.child(j)))
        px = 1.0 - np.searchsorted(sx, u_grid, side="left") / m
        py = 1.0 - np.searchsorted(sy, lambda2 * u_grid, side="left") / m
        deficit = max(deficit, float(np.max(lambda1 * py - px)))
        for k in np.flatnonzero(px + h < lambda1 * (py - h)):
            viol.append((d[j], float(u_grid[k]), float(px[k]), float(py[k])))
    return DominationReport(lambda1, lambda2, K, h, viol, deficit)


def unconditional_constant(delta: float) -> float:
    """``c(delta) = sqrt(2) e (4 log(8/delta) + log(4/e)) / delta``."""
    return math.sqrt(2.0) * math.e * (4.0 * math.log(8.0 / delta) + math.log(4.0 / math.e)) / delta


def unconditional_gate(delta: float) -> float:
    """Smallest admissible ``p`` (exclusive): ``4 log(8/delta) + log 4``."""
    return 4.0 * math.log(8.0 / delta) + math.log(4.0)


@dataclass
class UnconditionalReport:
    p: float
    gamma: float
    delta: float
    constant: float
    directions: np.ndarray = field(repr=False)
    radial_X: np.ndarray = field(repr=False)
    radial_E: np.ndarray = field(repr=False)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.radial_X / self.radial_E))

    def to_dict(self):
        return {"p": self.p, "gamma": self.gamma, "delta": self.delta, "c_delta": self.constant,
                "max_ratio": self.max_ratio, "allowed_ratio": self.constant / self.gamma,
                "n_violations": len(self.violations), "ok": self.ok}


def unconditional_comparison(specX: DistributionSpec, p: float, gamma: float,
                             delta: Optional[float] = None, directions=None,
                             m: Optional[int] = None, seed=0, conf: float = 0.95) -> UnconditionalReport:
    """Check ``r_{K_p(X)} <= (c(delta)/gamma) r_{K_p(E)}`` with ``E`` Rademacher.

    ``delta`` defaults to the lower Hoeffding end of
    :func:`estimate_small_ball` at ``gamma`` (Euclidean norm) on the same
    grid.  A violation needs the lower band of the left side above the upper
    band of the right side.
    """
    if specX.family != "unconditional":
        raise ParameterError("specX must be an unconditional vector")
    if not gamma > 0:
        raise ParameterError(f"gamma must be > 0, got {gamma}")
    n = specX.dim
    d = _prepare(directions, n, 2.0, seed)
    if delta is None:
        est = estimate_small_ball(specX, 2.0, gamma, d, m or 100_000, seed)
        delta = max(est.value - est.halfwidth, 1e-12)
    if not 0 < delta <= 1:
        raise ParameterError(f"delta must lie in (0, 1], got {delta}")
    gate = unconditional_gate(delta)
    if not p > gate:
        raise PreconditionError(f"p={p} is below the gate: need p > 4 log(8/delta) + log 4 = {gate:.6g}")
    m = max(100_000, math.ceil(100 * math.exp(p))) if m is None else int(m)
    _check_m(p, m)
    c = unconditional_constant(delta)
    rad = DistributionSpec.rademacher(n)
    sE = row_stream(seed, 1 << 41)
    rx, re, viol = np.empty(len(d)), np.empty(len(d)), []
    for j in range(len(d)):
        bx = radial_band(_samples(specX, d, m, seed, j), p, conf)
        be = radial_band(projections(rad, d[j], m, sE.child(j)), p, conf)
        rx[j], re[j] = bx[1], be[1]
        if bx[0] > (c / gamma) * be[2]:
            viol.append((d[j], bx, be))
    return UnconditionalReport(p, gamma, delta, c, d, rx, re, viol)
