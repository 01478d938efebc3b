"""Command line entry point.

::

    polyfloat <experiment-kind> --config FILE [--seed S] [--jobs J] [--out DIR]

Writes ``<kind>_rows.csv`` (one row per trial or grid cell),
``<kind>_summary.json`` and ``manifest.json`` into the output directory.
Exit status is 0 on success, 2 on a configuration error, 3 when a solver
budget guard refuses the work, and 1 for any other failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import KINDS, ConfigError, ExperimentConfig
from .errors import BudgetError
from .experiments import run_kind
from .io import dumps, write_json, write_rows_csv
from .seeding import derive_seed

__all__ = ["ExperimentConfig", "derive_seed", "load_config", "main", "run"]

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run(config: ExperimentConfig, jobs: int = 1, out=None) -> dict:
    """Run one experiment and write its artifacts; returns the summary."""
    out = Path(config.out if out is None else out)
    out.mkdir(parents=True, exist_ok=True)
    rows, cols, summary = run_kind(config, jobs)
    rows_path = out / f"{config.kind}_rows.csv"
    summary_path = out / f"{config.kind}_summary.json"
    write_rows_csv(rows_path, rows, cols)
    summary = dict(summary, config_sha256=config.digest(), seed=config.seed)
    write_json(summary_path, summary)
    manifest = {
        "config": config.to_dict(),
        "config_sha256": config.digest(),
        "versions": {"polyfloat": __version__, "python": platform.python_version(),
                     "numpy": np.__version__, "scipy": scipy.__version__},
        "artifacts": {p.name: _sha256(p) for p in (rows_path, summary_path)},
    }
    write_json(out / "manifest.json", manifest)
    return summary


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polyfloat", description="Floating-body and random-polytope experiments.")
    ap.add_argument("kind", choices=KINDS, help="experiment kind")
    ap.add_argument("--config", required=True, help="JSON configuration file")
    ap.add_argument("--seed", type=int, default=None, help="override the configured master seed")
    ap.add_argument("--jobs", type=int, default=1, help="trial-level worker threads")
    ap.add_argument("--out", default=None, help="output directory (overrides the config)")
    return ap


def load_config(path, kind: str, seed=None, out=None) -> ExperimentConfig:
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ConfigError("config", "must be a JSON object")
    if obj.setdefault("kind", kind) != kind:
        raise ConfigError("config.kind", f"is {obj['kind']!r} but the command line asks for {kind!r}")
    if seed is not None:
        obj["seed"] = seed
    if out is not None:
        obj["out"] = str(out)
    return ExperimentConfig.from_dict(obj)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config, args.kind, args.seed, args.out)
        summary = run(cfg, args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetError as exc:
        print(f"budget refusal: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except Exception as exc:  # surfaced, never swallowed silently
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(dumps(summary))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
