"""Seeded sampling of the symmetric random vectors used throughout the package.

Families
--------
``gaussian``        standard Gaussian vector.
``rademacher``      uniform on ``{-1, 1}^n``.
``stable``          i.i.d. symmetric ``q``-stable coordinates, ``1 <= q <= 2``,
                    with characteristic function ``exp(-|t|^q / 2)``.  For
                    ``q = 1`` this is the Cauchy law with scale 1/2 (not the
                    usual scale-1 convention); ``q = 2`` is N(0, 1).
``student_t``       i.i.d. Student-t with ``d > 2`` degrees of freedom, rescaled
                    to unit variance.
``unconditional``   a base vector whose coordinates are multiplied by independent
                    uniform signs.
``logconcave_exp``  i.i.d. Laplace coordinates with unit variance.

Every family accepts an extra positive ``scale`` multiplying the whole vector.

JSON form::

    {"family": "stable", "params": {"q": 1.0}, "dim": 5}
    {"family": "unconditional", "params": {"base": {...}}, "dim": 5}

``params`` may also carry ``"scale"``; the base of an unconditional vector must
have the same ``dim``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from .errors import DomainError, ParameterError, SizeError
from .seeding import RngStream, as_stream

FAMILIES = ("gaussian", "rademacher", "stable", "student_t", "unconditional", "logconcave_exp")

#: Default cap on the number of entries in a single sample matrix.
MAX_MATRIX_ENTRIES = 50_000_000

# rows drawn per block when reducing large Monte Carlo samples
CHUNK_ROWS = 1 << 16


@dataclass(frozen=True)
class DistributionSpec:
    """Law of a symmetric random vector in ``R^dim``."""

    family: str
    dim: int
    q: Optional[float] = None
    d: Optional[float] = None
    base: Optional["DistributionSpec"] = None
    scale: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise ParameterError(f"dim must be a positive integer, got {self.dim!r}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ParameterError(f"scale must be positive and finite, got {self.scale!r}")
        if self.family == "stable":
            if self.q is None or not 1.0 <= self.q <= 2.0:
                raise ParameterError(f"stable law requires 1 <= q <= 2, got q={self.q!r}")
        elif self.q is not None:
            raise ParameterError(f"parameter q is not used by family {self.family!r}")
        if self.family == "student_t":
            if self.d is None or not self.d > 2 or not math.isfinite(self.d):
                raise ParameterError(
                    f"student_t requires finite d > 2 (unit-variance normalisation), got d={self.d!r}")
        elif self.d is not None:
            raise ParameterError(f"parameter d is not used by family {self.family!r}")
        if self.family == "unconditional":
            if not isinstance(self.base, DistributionSpec):
                raise ParameterError("unconditional family requires a base DistributionSpec")
            if self.base.dim != self.dim:
                raise ParameterError(f"base dim {self.base.dim} differs from dim {self.dim}")
        elif self.base is not None:
            raise ParameterError(f"parameter base is not used by family {self.family!r}")

    # constructors
    @classmethod
    def gaussian(cls, dim, scale=1.0):
        return cls("gaussian", dim, scale=scale)

    @classmethod
    def rademacher(cls, dim, scale=1.0):
        return cls("rademacher", dim, scale=scale)

    @classmethod
    def stable(cls, q, dim, scale=1.0):
        return cls("stable", dim, q=float(q), scale=scale)

    @classmethod
    def student_t(cls, d, dim, scale=1.0):
        return cls("student_t", dim, d=float(d), scale=scale)

    @classmethod
    def unconditional(cls, base, scale=1.0):
        return cls("unconditional", base.dim, base=base, scale=scale)

    @classmethod
    def logconcave_exp(cls, dim, scale=1.0):
        return cls("logconcave_exp", dim, scale=scale)

    def with_dim(self, dim: int) -> "DistributionSpec":
        base = self.base.with_dim(dim) if self.base is not None else None
        return DistributionSpec(self.family, dim, self.q, self.d, base, self.scale)

    @property
    def moment_barrier(self) -> float:
        """Supremum of the exponents ``r`` with ``E|<X,t>|^r < inf``."""
        if self.family == "stable":
            return math.inf if self.q == 2.0 else self.q
        if self.family == "student_t":
            return self.d
        if self.family == "unconditional":
            return self.base.moment_barrier
        return math.inf

    def to_dict(self) -> dict:
        params = {}
        if self.q is not None:
            params["q"] = self.q
        if self.d is not None:
            params["d"] = self.d
        if self.base is not None:
            params["base"] = self.base.to_dict()
        if self.scale != 1.0:
            params["scale"] = self.scale
        return {"family": self.family, "params": params, "dim": int(self.dim)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, obj: dict) -> "DistributionSpec":
        if not isinstance(obj, dict):
            raise ParameterError("distribution spec must be a JSON object")
        unknown = set(obj) - {"family", "params", "dim"}
        if unknown:
            raise ParameterError(f"unknown distribution fields: {sorted(unknown)}")
        params = dict(obj.get("params") or {})
        allowed = {"q", "d", "base", "scale"}
        if set(params) - allowed:
            raise ParameterError(f"unknown distribution params: {sorted(set(params) - allowed)}")
        base = params.get("base")
        if base is not None:
            base = cls.from_dict(base)
        try:
            return cls(
                family=obj["family"],
                dim=obj["dim"],
                q=None if params.get("q") is None else float(params["q"]),
                d=None if params.get("d") is None else float(params["d"]),
                base=base,
                scale=float(params.get("scale", 1.0)),
            )
        except KeyError as exc:
            raise ParameterError(f"distribution spec missing field {exc.args[0]!r}") from None

    @classmethod
    def from_json(cls, text: str) -> "DistributionSpec":
        return cls.from_dict(json.loads(text))


def _stable_cms(q: float, gen: np.random.Generator, shape) -> np.ndarray:
    # Chambers-Mallows-Stuck, symmetric case: char. fn exp(-|t|^q), then
    # rescaled by 2^(-1/q) to exp(-|t|^q / 2).
    v = gen.uniform(-math.pi / 2, math.pi / 2, size=shape)
    if q == 1.0:
        x = np.tan(v)
    else:
        w = gen.standard_exponential(size=shape)
        x = (np.sin(q * v) / np.cos(v) ** (1.0 / q)
             * (np.cos((1.0 - q) * v) / w) ** ((1.0 - q) / q))
    return x * 2.0 ** (-1.0 / q)


def draw(spec: DistributionSpec, gen: np.random.Generator, size: int) -> np.ndarray:
    """``size`` independent copies of the vector, as a ``(size, dim)`` array."""
    shape = (int(size), spec.dim)
    fam = spec.family
    if fam == "gaussian":
        x = gen.standard_normal(shape)
    elif fam == "rademacher":
        x = 2.0 * gen.integers(0, 2, size=shape, dtype=np.int8) - 1.0
    elif fam == "stable":
        x = _stable_cms(spec.q, gen, shape)
    elif fam == "student_t":
        x = gen.standard_t(spec.d, size=shape) * math.sqrt((spec.d - 2.0) / spec.d)
    elif fam == "logconcave_exp":
        x = gen.laplace(0.0, 1.0 / math.sqrt(2.0), size=shape)
    else:  # unconditional
        x = draw(spec.base, gen, size)
        x *= 2.0 * gen.integers(0, 2, size=shape, dtype=np.int8) - 1.0
    if spec.scale != 1.0:
        x *= spec.scale
    return x


def sample_vector(spec: DistributionSpec, rng) -> np.ndarray:
    """One draw of the vector from the start of stream ``rng``."""
    return draw(spec, as_stream(rng).generator(), 1)[0]


def row_stream(seed, i: int) -> RngStream:
    """Stream used for row ``i`` of :func:`sample_matrix`.

    An integer seed ``s`` maps row ``i`` to ``RngStream(s, i)``; a stream maps
    it to ``stream.child(i)``.
    """
    if isinstance(seed, RngStream):
        return seed.child(i)
    return RngStream(int(seed), i)


def sample_matrix(spec: DistributionSpec, N: int, seed, max_entries: int = MAX_MATRIX_ENTRIES) -> np.ndarray:
    """The ``N x n`` matrix whose rows are independent copies of the vector.

    Row ``i`` equals ``sample_vector(spec, row_stream(seed, i))``, so the first
    ``k`` rows do not depend on ``N``.
    """
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    if N * spec.dim > max_entries:
        raise SizeError(f"N*n = {N * spec.dim} exceeds the budget of {max_entries} entries")
    out = np.empty((N, spec.dim))
    for i in range(N):
        out[i] = draw(spec, row_stream(seed, i).generator(), 1)[0]
    return out


def projections(spec: DistributionSpec, theta, m: int, rng, chunk: int = CHUNK_ROWS) -> np.ndarray:
    """``m`` i.i.d. draws of the marginal ``<X, theta>`` (one stream, drawn in blocks)."""
    theta = np.asarray(theta, dtype=float)
    gen = as_stream(rng).generator()
    out = np.empty(m)
    for start in range(0, m, chunk):
        stop = min(start + chunk, m)
        out[start:stop] = draw(spec, gen, stop - start) @ theta
    return out


def multi_projections(spec: DistributionSpec, thetas, m: int, rng, chunk: int = CHUNK_ROWS) -> np.ndarray:
    """Marginals along several directions from shared vector draws, shape ``(m, k)``."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    gen = as_stream(rng).generator()
    out = np.empty((m, thetas.shape[0]))
    for start in range(0, m, chunk):
        stop = min(start + chunk, m)
        out[start:stop] = draw(spec, gen, stop - start) @ thetas.T
    return out


def stable_cdf(q: float, x):
    """Closed-form CDF of the standard ``q``-stable law for ``q`` in {1, 2}."""
    x = np.asarray(x, dtype=float)
    if q == 1.0:
        return 0.5 + np.arctan(2.0 * x) / math.pi
    if q == 2.0:
        return special.ndtr(x)
    raise DomainError(f"closed-form CDF only for q in {{1, 2}}, got q={q}")


def stable_quantile(q: float, u: float, mode: str = "exact", m: Optional[int] = None, rng=None) -> float:
    """``u``-quantile of the standard ``q``-stable law.

    ``mode="exact"`` covers ``q = 1`` (``tan`` inversion of the scale-1/2
    Cauchy CDF) and ``q = 2`` (``scipy.special.ndtri``, accurate to a few
    ulps).  Any other ``q`` needs ``mode="monte-carlo"`` with sample count
    ``m``: the result is the order statistic of rank ``ceil(u*m)`` of ``m``
    draws, and :func:`polyfloat.floating.quantile_interval` gives its
    distribution-free confidence band.
    """
    if not 0.0 < u < 1.0:
        raise DomainError(f"u must lie in (0, 1), got {u}")
    if not 1.0 <= q <= 2.0:
        raise ParameterError(f"q must lie in [1, 2], got {q}")
    if mode == "exact":
        if q == 1.0:
            if u == 0.5:
                return 0.0
            return 0.5 * math.tan(math.pi * (u - 0.5))
        if q == 2.0:
            return float(special.ndtri(u))
        raise ParameterError(f"no closed-form quantile for q={q}; use mode='monte-carlo' with m samples")
    if mode == "monte-carlo":
        if m is None or m < 1:
            raise ParameterError("monte-carlo mode requires a sample count m >= 1")
        gen = as_stream(0 if rng is None else rng).generator()
        xs = _stable_cms(float(q), gen, (int(m),))
        k = max(1, math.ceil(u * m))
        return float(np.partition(xs, k - 1)[k - 1])
    raise ParameterError(f"unknown mode {mode!r}")


def sphere_directions(n: int, M: int, rng) -> np.ndarray:
    """``M`` directions uniform on the Euclidean unit sphere (normalized Gaussians)."""
    gen = as_stream(rng).generator()
    g = gen.standard_normal((M, n))
    nrm = np.linalg.norm(g, axis=1, keepdims=True)
    while np.any(nrm == 0):  # measure-zero, but keep rows valid
        bad = nrm[:, 0] == 0
        g[bad] = gen.standard_normal((int(bad.sum()), n))
        nrm = np.linalg.norm(g, axis=1, keepdims=True)
    return g / nrm
