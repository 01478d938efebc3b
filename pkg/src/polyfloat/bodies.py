"""Centrally symmetric star bodies, their radial and support functions, and polars.

Directions are always taken in the Euclidean parametrisation: ``radial(body,
theta)`` is the largest ``beta`` with ``beta * theta / |theta|_2`` in the body.
A different working norm only rescales ``r`` by a positive factor.

Polarity conventions: for a body ``K`` the gauge of the polar ``K°`` is the
support function of ``conv(K)``, so ``polar_radial(K, psi) = 1 / h_conv(K)(psi)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Tuple

import numpy as np

from .errors import DomainError, ParameterError, StateError, UnsupportedError
from .samplers import DistributionSpec, stable_quantile


class NearestDirectionWarning(UserWarning):
    """An empirical radial was read from the nearest stored direction."""


def conjugate(q: float) -> float:
    """Hölder conjugate ``q'`` with ``1/q + 1/q' = 1``."""
    if q == 1.0:
        return math.inf
    if math.isinf(q):
        return 1.0
    return q / (q - 1.0)


def lq_norm(t, q: float) -> float:
    """``l_q`` norm for ``1 <= q <= inf``.

    >>> lq_norm([3, 4], 2), lq_norm([3, 4], math.inf), lq_norm([3, 4], 1)
    (5.0, 4.0, 7.0)
    """
    if not (q >= 1.0):
        raise DomainError(f"l_q norm needs q >= 1 (or inf), got q={q}")
    t = np.abs(np.asarray(t, dtype=float))
    if math.isinf(q):
        return float(t.max(initial=0.0))
    if q == 1.0:
        return float(t.sum())
    if q == 2.0:
        return float(np.sqrt(np.dot(t.ravel(), t.ravel())))
    scale = t.max(initial=0.0)
    if scale == 0.0:
        return 0.0
    return float(scale * np.sum((t / scale) ** q) ** (1.0 / q))


def _unit(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    nrm = np.linalg.norm(theta)
    if not nrm > 0:
        raise DomainError("direction must be a nonzero vector")
    return theta / nrm


@dataclass(frozen=True)
class LqBall:
    """``radius * B_q^n``."""

    radius: float
    q: float
    dim: int

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ParameterError(f"radius must be positive and finite, got {self.radius}")
        if not self.q >= 1.0:
            raise ParameterError(f"q must be >= 1, got {self.q}")


@dataclass(frozen=True)
class ConvHullUnion:
    """Convex hull of a union of l_q balls."""

    members: Tuple[LqBall, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        _check_members(self.members)

    @property
    def dim(self):
        return self.members[0].dim


@dataclass(frozen=True)
class Intersection:
    """Intersection of l_q balls."""

    members: Tuple[LqBall, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        _check_members(self.members)

    @property
    def dim(self):
        return self.members[0].dim


def _check_members(members):
    if not members:
        raise ParameterError("need at least one member ball")
    if any(not isinstance(b, LqBall) for b in members):
        raise ParameterError("members must be LqBall instances")
    if len({b.dim for b in members}) != 1:
        raise ParameterError("member balls have different dimensions")


@dataclass(frozen=True, eq=False)
class Empirical:
    """Star body known through a table of unit directions and radial values.

    Both ``theta`` and ``-theta`` are stored explicitly when the table was built
    from a symmetric estimator, so central symmetry can be checked rather than
    assumed.
    """

    directions: np.ndarray
    radii: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        d = np.atleast_2d(np.asarray(self.directions, dtype=float))
        r = np.asarray(self.radii, dtype=float).ravel()
        if d.shape[0] != r.shape[0]:
            raise ParameterError("directions and radii have different lengths")
        if r.size and not (np.all(r > 0) and np.all(np.isfinite(r))):
            raise ParameterError("radial values must be positive and finite")
        norms = np.linalg.norm(d, axis=1) if r.size else np.ones(0)
        if r.size and np.any(norms == 0):
            raise ParameterError("zero direction in table")
        if r.size:
            # leave rows that are already unit untouched so tables round-trip exactly
            fix = np.abs(norms - 1.0) > 1e-14
            d = d.copy()
            d[fix] /= norms[fix, None]
        d.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "directions", d)
        object.__setattr__(self, "radii", r)

    @property
    def dim(self):
        return self.directions.shape[1]

    def __len__(self):
        return self.radii.size

    def lookup(self, theta):
        """``(radial, exact)``; ``exact`` is False for a nearest-direction fallback."""
        if self.radii.size == 0:
            raise StateError("empirical body has an empty direction table")
        u = _unit(theta)
        cos = self.directions @ u
        j = int(np.argmax(cos))
        return float(self.radii[j]), bool(cos[j] >= 1.0 - 1e-12)

    def symmetry_pairs(self):
        """Index pairs ``(i, j)`` with ``directions[j] == -directions[i]``, ``i < j``."""
        d = self.directions
        cos = d @ d.T
        pairs = []
        for i in range(len(d)):
            j = int(np.argmin(cos[i]))
            if i < j and cos[i, j] <= -1.0 + 1e-12:
                pairs.append((i, j))
        return pairs


StarBody = (LqBall, ConvHullUnion, Intersection, Empirical)


class PolarBounds(NamedTuple):
    """Bracket returned where a polar radial is not computed exactly."""

    lower: float
    upper: float
    approximate: bool = True


@dataclass(frozen=True)
class GaugeBody:
    """The polar ``polar_of°``, described through its gauge."""

    polar_of: object

    @property
    def dim(self):
        return self.polar_of.dim

    def gauge(self, w) -> float:
        return support(self.polar_of, w)

    def radial(self, psi) -> float:
        return 1.0 / self.gauge(_unit(psi))


def radial(body, theta) -> float:
    """Radial function at the direction of ``theta``.

    ``ConvHullUnion`` returns the maximum of its members' radials, i.e. the
    radial of the union; it is a lower bound on the hull's radial, exact in
    every direction where a member's boundary is on the hull boundary.
    ``Empirical`` bodies read the table, falling back to the nearest stored
    direction with a :class:`NearestDirectionWarning`.
    """
    if isinstance(body, Empirical):
        value, exact = body.lookup(theta)
        if not exact:
            warnings.warn("direction not in table; using nearest stored direction",
                          NearestDirectionWarning, stacklevel=2)
        return value
    u = _unit(theta)
    if isinstance(body, LqBall):
        return body.radius / lq_norm(u, body.q)
    if isinstance(body, ConvHullUnion):
        return max(radial(b, u) for b in body.members)
    if isinstance(body, Intersection):
        return min(radial(b, u) for b in body.members)
    if isinstance(body, GaugeBody):
        return body.radial(u)
    raise TypeError(f"not a star body: {type(body).__name__}")


def gauge(body, x) -> float:
    """Minkowski functional ``inf{s > 0 : x in s*body}`` (star-body sense)."""
    x = np.asarray(x, dtype=float)
    nrm = np.linalg.norm(x)
    if nrm == 0:
        return 0.0
    return nrm / radial(body, x)


def support(body, psi) -> float:
    """Support function ``h_conv(body)(psi)`` for bodies where it is exact.

    Raises :class:`UnsupportedError` for ``Intersection`` and ``Empirical``;
    use :func:`support_bounds` there.
    """
    psi = np.asarray(psi, dtype=float)
    if isinstance(body, LqBall):
        return body.radius * lq_norm(psi, conjugate(body.q))
    if isinstance(body, ConvHullUnion):
        return max(support(b, psi) for b in body.members)
    raise UnsupportedError(f"no exact support function for {type(body).__name__}")


def support_bounds(body, psi):
    """``(lower, upper)`` bracket of ``h_conv(body)(psi)``.

    For an intersection the upper bound is the smallest member support and the
    lower bound comes from the boundary point in direction ``psi``.  For an
    empirical table the lower bound is ``max_j r_j <theta_j, psi>``; no finite
    upper bound is available without continuity assumptions.
    """
    psi = np.asarray(psi, dtype=float)
    if isinstance(body, (LqBall, ConvHullUnion)):
        h = support(body, psi)
        return h, h
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        return 0.0, 0.0
    if isinstance(body, Intersection):
        upper = min(support(b, psi) for b in body.members)
        lower = radial(body, psi) * nrm
        return lower, upper
    if isinstance(body, Empirical):
        if body.radii.size == 0:
            raise StateError("empirical body has an empty direction table")
        lower = float(np.max(body.radii * (body.directions @ psi)))
        return max(lower, 0.0), math.inf
    raise TypeError(f"not a star body: {type(body).__name__}")


def polar_radial(body, psi):
    """Radial function of ``body°`` at the direction of ``psi``.

    Exact (a float) for ``LqBall`` and ``ConvHullUnion``; other bodies give a
    :class:`PolarBounds` bracket flagged approximate.
    """
    u = _unit(psi)
    if isinstance(body, (LqBall, ConvHullUnion)):
        return 1.0 / support(body, u)
    lo, hi = support_bounds(body, u)
    return PolarBounds(1.0 / hi if hi > 0 else math.inf, 1.0 / lo if lo > 0 else math.inf)


def polar(body):
    """Polar body in closed form (``LqBall``, ``ConvHullUnion``, ``Intersection``)."""
    if isinstance(body, LqBall):
        return LqBall(1.0 / body.radius, conjugate(body.q), body.dim)
    if isinstance(body, ConvHullUnion):
        return Intersection(tuple(polar(b) for b in body.members))
    if isinstance(body, Intersection):
        return ConvHullUnion(tuple(polar(b) for b in body.members))
    raise UnsupportedError(f"no closed-form polar for {type(body).__name__}")


def dual_point(body, t) -> np.ndarray:
    """A point ``u`` of ``conv(body)°`` with ``<u, t> = gauge(body, t)``.

    Available for ``LqBall``; for ``t`` on the boundary this is the polar point
    exposed by ``t``.
    """
    if not isinstance(body, LqBall):
        raise UnsupportedError("dual points are only implemented for LqBall")
    t = np.asarray(t, dtype=float)
    g = lq_norm(t, body.q)
    if g == 0:
        return np.zeros_like(t)
    if body.q == 1.0:
        return np.sign(t) / body.radius
    if math.isinf(body.q):
        u = np.zeros_like(t)
        j = int(np.argmax(np.abs(t)))
        u[j] = np.sign(t[j])
        return u / body.radius
    u = np.sign(t) * (np.abs(t) / g) ** (body.q - 1.0)
    return u / body.radius


class ClosedFormBody(NamedTuple):
    body: object
    tag: str  # "exact" or "equivalent-up-to-constants"


def closed_form_floating_body(spec: DistributionSpec, p: float) -> ClosedFormBody:
    """Floating body ``{t : P(<X,t> >= 1) <= exp(-p)}`` in closed form.

    Gaussian and ``q``-stable vectors (``q`` in {1, 2}) give exact l_q balls of
    radius ``1/Q`` with ``Q`` the ``1 - exp(-p)`` quantile of the standard
    marginal.  The Rademacher vector gives the shape ``conv(B_1 u p^(-1/2) B_2)``,
    correct only up to unstated absolute constants.
    """
    if not p > math.log(2.0):
        raise DomainError(f"p must exceed log 2 (quantile level above 1/2), got p={p}")
    u = -math.expm1(-p)
    fam, n = spec.family, spec.dim
    if fam == "gaussian" or (fam == "stable" and spec.q == 2.0):
        z = stable_quantile(2.0, u)
        return ClosedFormBody(LqBall(1.0 / (spec.scale * z), 2.0, n), "exact")
    if fam == "stable":
        if spec.q != 1.0:
            raise UnsupportedError(
                f"no exact quantile for q={spec.q}; estimate the body with polyfloat.floating")
        qv = stable_quantile(1.0, u)
        return ClosedFormBody(LqBall(1.0 / (spec.scale * qv), 1.0, n), "exact")
    if fam == "rademacher":
        s = spec.scale
        body = ConvHullUnion((LqBall(1.0 / s, 1.0, n), LqBall(1.0 / (s * math.sqrt(p)), 2.0, n)))
        return ClosedFormBody(body, "equivalent-up-to-constants")
    raise UnsupportedError(
        f"no closed-form floating body for family {fam!r}; use polyfloat.floating.estimate_floating_body")
