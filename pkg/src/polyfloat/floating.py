"""Monte Carlo estimation of floating bodies and L_p balls, with sandwich checks.

The radial function of ``K_p(X) = {t : P(<X,t> >= 1) <= e^-p}`` in direction
``theta`` is ``1/Q`` where ``Q`` is the ``1 - e^-p`` quantile of ``<X,theta>``
(for laws with a continuous CDF at ``Q``).  The estimator uses the order
statistic of rank ``ceil((1 - e^-p) m)``, which errs towards a larger ``Q`` and
hence a smaller radial.  For atomic laws such as Rademacher sums the estimator
targets ``1/Q`` exactly; ``r(theta)`` itself may differ at atoms.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import special

from .bodies import Empirical, lq_norm
from .errors import MomentError, ParameterError, PreconditionError
from .samplers import DistributionSpec, projections, row_stream


def required_samples(p: float) -> int:
    """Smallest admissible sample count, ``ceil(100 e^p)``."""
    return math.ceil(100.0 * math.exp(p))


def default_samples(p: float) -> int:
    return max(100_000, required_samples(p))


def quantile_level(p: float) -> float:
    return -math.expm1(-p)


def _check_m(p, m):
    need = required_samples(p)
    if m < need:
        raise PreconditionError(f"m={m} is too small for p={p}: need m >= 100*e^p = {need}")


def quantile_interval(samples, level: float, conf: float = 0.95):
    """``(lower, point, upper)`` order-statistic bracket for the ``level`` quantile.

    The point estimate has rank ``ceil(level*m)``; the bracket ranks are
    ``m*level -/+ z*sqrt(m*level*(1-level))`` (normal approximation to the
    binomial count below the true quantile).
    """
    s = np.asarray(samples, dtype=float)
    m = s.size
    z = float(special.ndtri(0.5 + conf / 2.0))
    k = max(1, math.ceil(level * m))
    half = z * math.sqrt(m * level * (1.0 - level))
    lo = min(max(1, math.floor(level * m - half)), k)
    hi = max(min(m, math.ceil(level * m + half)), k)
    part = np.partition(s, sorted({lo - 1, k - 1, hi - 1}))
    return float(part[lo - 1]), float(part[k - 1]), float(part[hi - 1])


def radial_from_samples(samples, p: float, threshold: float = 1.0) -> float:
    """``threshold / Q`` from draws of ``<X,theta>``; ``inf`` when ``Q <= 0``.

    Estimating at a threshold ``a`` instead of 1 rescales the radial by exactly
    ``a``, mirroring ``a K_p = {t : P(<X,t> >= a) <= e^-p}``.
    """
    s = np.asarray(samples, dtype=float)
    k = max(1, math.ceil(quantile_level(p) * s.size))
    q = float(np.partition(s, k - 1)[k - 1])
    return threshold / q if q > 0 else math.inf


def radial_band(samples, p: float, conf: float = 0.95, threshold: float = 1.0):
    """``(lower, point, upper)`` for the radial, from :func:`quantile_interval`."""
    qlo, qk, qhi = quantile_interval(samples, quantile_level(p), conf)
    inv = lambda q: threshold / q if q > 0 else math.inf  # noqa: E731
    return inv(qhi), inv(qk), inv(qlo)


def estimate_radial(spec: DistributionSpec, theta, p: float, m: Optional[int] = None, rng=0) -> float:
    """Monte Carlo radial of ``K_p(X)`` in the direction of ``theta``.

    Returns ``inf`` (out of model) if the empirical quantile is not positive,
    which cannot happen for the continuous families with ``p > log 2``.
    """
    m = default_samples(p) if m is None else int(m)
    _check_m(p, m)
    theta = np.asarray(theta, dtype=float)
    theta = theta / np.linalg.norm(theta)
    return radial_from_samples(projections(spec, theta, m, rng), p)


@dataclass
class FloatingBodyEstimate:
    body: Empirical
    p: float
    m: int
    spec: DistributionSpec
    quantile_level: float
    band_lower: np.ndarray
    band_upper: np.ndarray
    seed: object = None

    def to_dict(self):
        return {
            "spec": self.spec.to_dict(),
            "p": self.p,
            "m": self.m,
            "quantile_level": self.quantile_level,
            "seed": getattr(self.seed, "seed", self.seed),
            "directions": self.body.directions,
            "radii": self.body.radii,
            "band_lower": self.band_lower,
            "band_upper": self.band_upper,
        }

    def header(self):
        return {"spec": self.spec.to_dict(), "p": self.p, "m": self.m,
                "seed": getattr(self.seed, "seed", self.seed)}


def _unit_rows(directions):
    d = np.atleast_2d(np.asarray(directions, dtype=float))
    if d.shape[0] == 0:
        raise ParameterError("need at least one direction")
    norms = np.linalg.norm(d, axis=1)
    if np.any(norms == 0):
        raise ParameterError("zero direction")
    return d / norms[:, None]


def _map(fn, items, jobs):
    if jobs is None or jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def estimate_floating_body(spec: DistributionSpec, p: float, directions, m: Optional[int] = None,
                           seed=0, symmetric_pairs: bool = False, conf: float = 0.95,
                           jobs: int = 1) -> FloatingBodyEstimate:
    """Empirical ``K_p(X)`` over a direction table.

    Direction ``j`` uses its own stream ``row_stream(seed, j)``, so results do
    not depend on ``jobs``.  With ``symmetric_pairs`` every ``theta`` is
    followed by an independently estimated ``-theta``.
    """
    m = default_samples(p) if m is None else int(m)
    _check_m(p, m)
    d = _unit_rows(directions)
    if d.shape[1] != spec.dim:
        raise ParameterError(f"directions have dimension {d.shape[1]}, spec has {spec.dim}")
    if symmetric_pairs:
        d = np.stack([d, -d], axis=1).reshape(-1, spec.dim)

    def one(j):
        return radial_band(projections(spec, d[j], m, row_stream(seed, j)), p, conf)

    bands = np.array(_map(one, range(len(d)), jobs))
    bad = [j for j in range(len(d)) if not np.isfinite(bands[j, 1])]
    if bad:
        raise ParameterError(f"out-of-model radial (non-positive quantile) at directions {bad}")
    body = Empirical(d, bands[:, 1], meta={"spec": spec.to_dict(), "p": p, "m": m})
    return FloatingBodyEstimate(body, p, m, spec, quantile_level(p), bands[:, 0], bands[:, 2], seed)


def _moment_gate(spec: DistributionSpec, p: float):
    if p >= spec.moment_barrier:
        raise MomentError(
            f"E|<X,t>|^{p} is infinite for {spec.family} (moments exist only below {spec.moment_barrier});"
            " the L_p ball is degenerate, use the floating body instead")


def lp_norm_band(samples, p: float, conf: float = 0.95):
    """``(lower, point, upper)`` for ``(E|s|^p)^(1/p)`` from a CLT band on the mean."""
    a = np.abs(np.asarray(samples, dtype=float)) ** p
    mu = float(a.mean())
    se = float(a.std(ddof=1) / math.sqrt(a.size)) if a.size > 1 else math.inf
    z = float(special.ndtri(0.5 + conf / 2.0))
    lo = max(mu - z * se, 0.0)
    return lo ** (1.0 / p), mu ** (1.0 / p), (mu + z * se) ** (1.0 / p)


def estimate_lp_ball(spec: DistributionSpec, p: float, directions, m: int = 100_000, seed=0,
                     jobs: int = 1) -> Empirical:
    """Empirical ``B(L_p(X))``: radial ``1 / ||<X,theta>||_{L_p}``.

    Read as support values, ``1 / radii`` describes the centroid body
    ``Z_p(X)`` (see :func:`centroid_support`).
    """
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    _moment_gate(spec, p)
    d = _unit_rows(directions)

    def one(j):
        s = projections(spec, d[j], m, row_stream(seed, j))
        return float(np.mean(np.abs(s) ** p) ** (1.0 / p))

    norms = np.array(_map(one, range(len(d)), jobs))
    return Empirical(d, 1.0 / norms, meta={"spec": spec.to_dict(), "p": p, "m": m, "kind": "lp_ball"})


def centroid_support(lp_ball: Empirical) -> np.ndarray:
    """Support values ``h_{Z_p}(theta) = ||<X,theta>||_{L_p}`` on the table directions."""
    return 1.0 / lp_ball.radii


@dataclass
class SandwichReport:
    p: float
    gamma: float
    delta: float
    L: float
    r: float
    norm_q: float
    lower_bound: float
    upper_bound: float
    values: np.ndarray
    violations: list = field(default_factory=list)
    confident_violations: list = field(default_factory=list)
    min_slack_lower: float = math.nan
    min_slack_upper: float = math.nan

    @property
    def ok(self) -> bool:
        return not self.confident_violations

    def to_dict(self):
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def sandwich_check(est: FloatingBodyEstimate, gamma: float, delta: float, L: float, r: float,
                   norm_q: float = 2.0) -> SandwichReport:
    """Check ``(1/L) e^(-p/r) <= r(theta)*||theta|| <= 1/gamma`` on every direction.

    ``||.||`` is the working ``l_{norm_q}`` norm.  A violation is *confident*
    when the whole Monte Carlo band of the radial lies outside the bounds.
    """
    for name, v in (("gamma", gamma), ("L", L), ("r", r)):
        if not (v > 0 and math.isfinite(v)):
            raise ParameterError(f"{name} must be positive and finite, got {v}")
    if not 0 < delta <= 1:
        raise ParameterError(f"delta must lie in (0, 1], got {delta}")
    if not est.p > math.log(2.0 / delta):
        raise PreconditionError(f"need p > log(2/delta) = {math.log(2.0 / delta):.6g}, got p={est.p}")
    lower = math.exp(-est.p / r) / L
    upper = 1.0 / gamma
    scale = np.array([lq_norm(t, norm_q) for t in est.body.directions])
    val = est.body.radii * scale
    blo, bhi = est.band_lower * scale, est.band_upper * scale
    viol = [int(j) for j in np.flatnonzero((val < lower) | (val > upper))]
    conf = [int(j) for j in np.flatnonzero((bhi < lower) | (blo > upper))]
    return SandwichReport(est.p, gamma, delta, L, r, norm_q, lower, upper, val, viol, conf,
                          float(np.min(val - lower)), float(np.min(upper - val)))


def lemma_constant(D: float) -> float:
    """``c_1 = 1 / (4 log(4D/3))`` of the reverse inclusion ``K_p ⊂ 2 B(L_{c_1 p})``."""
    if not D > 0.75:
        raise ParameterError(f"regularity constant must exceed 3/4, got {D}")
    return 1.0 / (4.0 * math.log(4.0 * D / 3.0))


@dataclass
class EquivalenceReport:
    p: float
    D: float
    c1: float
    left_tested: bool
    right_tested: bool
    left_skip_reason: Optional[str]
    right_skip_reason: Optional[str]
    radial_K: np.ndarray
    radial_Lp: Optional[np.ndarray]
    radial_Lc1p: Optional[np.ndarray]
    left_margin: Optional[np.ndarray]
    right_margin: Optional[np.ndarray]
    left_confident_violations: list
    right_confident_violations: list

    @property
    def ok(self) -> bool:
        return not (self.left_confident_violations or self.right_confident_violations)

    def to_dict(self):
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def lp_equivalence_check(spec: DistributionSpec, p: float, D: float, directions, m: Optional[int] = None,
                         seed=0, conf: float = 0.95) -> EquivalenceReport:
    """Check ``(1/e) B(L_p) ⊂ K_p ⊂ 2 B(L_{c_1 p})`` direction-wise.

    Margins are ``r_K - r_{B(L_p)}/e`` (left) and ``2 r_{B(L_{c1 p})} - r_K``
    (right); both should be nonnegative.  A side whose moment does not exist is
    skipped with a reason rather than tested.
    """
    c1 = lemma_constant(D)
    gate = max(2.0 * c1, 2.0 * math.log(2.0))
    if p < gate:
        raise PreconditionError(f"need p >= max(2 c1, 2 log 2) = {gate:.6g}, got p={p}")
    m = default_samples(p) if m is None else int(m)
    _check_m(p, m)
    d = _unit_rows(directions)
    barrier = spec.moment_barrier
    left_ok = p < barrier
    right_ok = c1 * p < barrier
    left_reason = None if left_ok else f"E|<X,t>|^{p} infinite (moments only below {barrier})"
    right_reason = None if right_ok else f"E|<X,t>|^{c1 * p:.6g} infinite (moments only below {barrier})"

    rk, rlp, rq = [], [], []
    lconf, rconf = [], []
    for j in range(len(d)):
        s = projections(spec, d[j], m, row_stream(seed, j))
        klo, kpt, khi = radial_band(s, p, conf)
        rk.append(kpt)
        if left_ok:
            nlo, npt, nhi = lp_norm_band(s, p, conf)
            rlp.append(1.0 / npt)
            # confident failure of (1/e) r_B <= r_K
            if (1.0 / nhi) / math.e > khi:
                lconf.append(j)
        if right_ok:
            nlo, npt, nhi = lp_norm_band(s, c1 * p, conf)
            rq.append(1.0 / npt)
            # confident failure of r_K <= 2 r_B(L_c1p)
            if nlo > 0 and klo > 2.0 / nlo:
                rconf.append(j)
    rk = np.array(rk)
    rlp = np.array(rlp) if left_ok else None
    rq = np.array(rq) if right_ok else None
    return EquivalenceReport(
        p, D, c1, left_ok, right_ok, left_reason, right_reason, rk, rlp, rq,
        rk - rlp / math.e if left_ok else None,
        2.0 * rq - rk if right_ok else None,
        lconf, rconf)
