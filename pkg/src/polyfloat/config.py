"""Versioned JSON experiment configuration.

Example::

    {
      "schema_version": 1,
      "kind": "inclusion-sweep",
      "distribution": {"family": "gaussian", "params": {}},
      "n": 20, "N": 2000, "alpha": 0.5, "p": "rule",
      "trials": 50, "M": 1000, "m": 100000, "seed": 1,
      "options": {"threshold": 0.5}
    }

``p`` is either a number or ``"rule"``, meaning ``p = alpha * log(e N / n)``.
The distribution's ``dim`` may be omitted; it is filled in per kind (``N``
for ``nsp`` and ``recovery``, where one draw is a row of the ``n x N``
measurement matrix, and ``n`` otherwise).  Unknown fields are rejected.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

from .errors import ParameterError
from .samplers import DistributionSpec

SCHEMA_VERSION = 1

KINDS = ("floating-body", "inclusion-sweep", "certify", "scaling-fit", "assumptions", "nsp",
         "recovery", "domination")

# per-kind options and their defaults
OPTION_DEFAULTS = {
    "floating-body": {"conf": 0.95},
    "inclusion-sweep": {"threshold": 0.5, "variant": "symmetric"},
    "certify": {"c": 0.5, "variant": "symmetric", "measure": "points"},
    "scaling-fit": {"ratios": [8, 16, 32, 64], "rate": 0.9, "variant": "symmetric"},
    "assumptions": {"gamma": 1.0, "r": 2.0, "norm_q": 2.0, "q_grid": [1.0, 2.0]},
    "nsp": {"s": 2, "signals": 20, "budget": 100_000},
    "recovery": {"s": 4, "noise_levels": [0.0, 0.1, 1.0], "noise": "isotropic", "mode": "blind"},
    "domination": {"Y": None, "lambda1": 1.0, "lambda2": 1.0, "u_grid": [0.5, 1.0, 1.5, 2.0, 3.0]},
}

TOLERANCE_DEFAULTS = {"feas": 1e-8, "dual": 1e-8, "gap": 1e-8}

FIELDS = ("schema_version", "kind", "distribution", "n", "N", "alpha", "p", "trials", "M", "m",
          "seed", "out", "tolerances", "options")


class ConfigError(ParameterError):
    """Validation failure; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class ExperimentConfig:
    kind: str
    distribution: dict
    n: int
    N: int = 1
    alpha: Optional[float] = None
    p: Any = "rule"
    trials: int = 1
    M: int = 1000
    m: int = 100_000
    seed: int = 0
    out: str = "out"
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCE_DEFAULTS))
    options: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        self.validate()

    # -- validation -------------------------------------------------------
    def validate(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError("config.schema_version", f"unsupported version {self.schema_version!r}")
        if self.kind not in KINDS:
            raise ConfigError("config.kind", f"must be one of {list(KINDS)}, got {self.kind!r}")
        for name in ("n", "N", "trials", "M", "m"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ConfigError(f"config.{name}", f"must be a positive integer, got {v!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError("config.seed", f"must be an integer in [0, 2**64), got {self.seed!r}")
        if self.alpha is not None:
            if not isinstance(self.alpha, (int, float)) or not 0 < self.alpha < 1:
                raise ConfigError("config.alpha", f"must lie in (0, 1), got {self.alpha!r}")
        if self.p == "rule":
            if self.alpha is None and self.kind in ("floating-body", "inclusion-sweep", "certify",
                                                    "scaling-fit"):
                raise ConfigError("config.alpha", "required when p is 'rule'")
        elif isinstance(self.p, bool) or not isinstance(self.p, (int, float)) or not self.p > 0:
            raise ConfigError("config.p", f"must be a positive number or 'rule', got {self.p!r}")
        if not isinstance(self.tolerances, dict):
            raise ConfigError("config.tolerances", "must be an object")
        for k, v in self.tolerances.items():
            if k not in TOLERANCE_DEFAULTS:
                raise ConfigError(f"config.tolerances.{k}", "unknown field")
            if not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"config.tolerances.{k}", f"must be positive, got {v!r}")
        if not isinstance(self.options, dict):
            raise ConfigError("config.options", "must be an object")
        allowed = OPTION_DEFAULTS[self.kind]
        for k in self.options:
            if k not in allowed:
                raise ConfigError(f"config.options.{k}", f"unknown option for kind {self.kind!r}")
        self._spec("config.distribution", self.distribution, self.spec_dim)
        if self.kind == "domination":
            Y = self.options.get("Y")
            if Y is None:
                raise ConfigError("config.options.Y", "required for kind 'domination'")
            self._spec("config.options.Y", Y, self.n)
        if self.kind == "scaling-fit":
            fam = self.distribution.get("family")
            if fam not in ("gaussian", "stable"):
                raise ConfigError("config.distribution.family", "scaling-fit needs 'gaussian' or 'stable'")

    @staticmethod
    def _spec(path, obj, dim):
        if not isinstance(obj, dict):
            raise ConfigError(path, "must be an object")
        obj = copy.deepcopy(obj)
        if "dim" in obj and obj["dim"] != dim:
            raise ConfigError(f"{path}.dim", f"must equal {dim} for this kind, got {obj['dim']!r}")
        obj["dim"] = dim
        base = obj.get("params", {}).get("base") if isinstance(obj.get("params"), dict) else None
        if isinstance(base, dict):
            base.setdefault("dim", dim)
        try:
            return DistributionSpec.from_dict(obj)
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(path, str(exc)) from None

    # -- derived quantities ----------------------------------------------
    @property
    def spec_dim(self) -> int:
        return self.N if self.kind in ("nsp", "recovery") else self.n

    @property
    def spec(self) -> DistributionSpec:
        return self._spec("config.distribution", self.distribution, self.spec_dim)

    @property
    def spec_Y(self) -> DistributionSpec:
        return self._spec("config.options.Y", self.options["Y"], self.n)

    @property
    def p_value(self) -> Optional[float]:
        if self.p == "rule":
            if self.alpha is None:
                return None
            return self.alpha * math.log(math.e * self.N / self.n)
        return float(self.p)

    def option(self, name):
        return self.options.get(name, OPTION_DEFAULTS[self.kind][name])

    def tol(self, name):
        return self.tolerances.get(name, TOLERANCE_DEFAULTS[name])

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        return {name: copy.deepcopy(getattr(self, name)) for name in FIELDS}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, obj) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config", "must be a JSON object")
        for k in obj:
            if k not in FIELDS:
                raise ConfigError(f"config.{k}", "unknown field")
        for k in ("kind", "distribution", "n"):
            if k not in obj:
                raise ConfigError(f"config.{k}", "missing required field")
        return cls(**copy.deepcopy(obj))

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON: {exc}") from None
        return cls.from_dict(obj)

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form (sorted keys, no whitespace, ``out`` excluded)."""
        body = {k: v for k, v in self.to_dict().items() if k != "out"}
        canon = json.dumps(body, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()
