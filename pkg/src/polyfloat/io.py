"""File formats: empirical-body CSV, matrix CSV / .npy, JSON reports, row CSVs.

Empirical body CSV::

    # {"m": 100000, "p": 2.0, "seed": 1, "spec": {...}}
    theta_1,...,theta_n,r
    0.6,0.8,1.234
    ...

The first line is ``#`` followed by a JSON header with keys ``spec``, ``p``,
``m`` and ``seed``.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from pathlib import Path

import numpy as np

from .bodies import Empirical


def jsonable(obj):
    """Recursively convert dataclasses / numpy values to JSON-compatible types.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
    """
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_dict"):
            return jsonable(obj.to_dict())
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True)


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj) + "\n")


def write_empirical_csv(path, body: Empirical, header: dict) -> None:
    n = body.dim
    with open(path, "w", newline="") as fh:
        fh.write("# " + json.dumps(jsonable(header), sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"theta_{i + 1}" for i in range(n)] + ["r"])
        for theta, r in zip(body.directions, body.radii):
            w.writerow([repr(float(x)) for x in theta] + [repr(float(r))])


def read_empirical_csv(path):
    """Return ``(body, header)``."""
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ValueError("empirical body CSV must start with a '# {json}' header line")
        header = json.loads(first[1:])
        rows = list(csv.reader(fh))
    cols = rows[0]
    if cols[-1] != "r" or not all(c == f"theta_{i + 1}" for i, c in enumerate(cols[:-1])):
        raise ValueError(f"unexpected columns {cols}")
    data = np.array([[float(x) for x in row] for row in rows[1:]], dtype=float).reshape(-1, len(cols))
    body = Empirical(data[:, :-1], data[:, -1], meta=header)
    return body, header


def load_matrix(path) -> np.ndarray:
    """Dense matrix from ``.npy`` (row-major binary) or comma-separated text."""
    path = Path(path)
    if path.suffix == ".npy":
        return np.load(path, allow_pickle=False)
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=float))


def save_matrix(path, A) -> None:
    path = Path(path)
    if path.suffix == ".npy":
        np.save(path, np.ascontiguousarray(A, dtype=float))
    else:
        np.savetxt(path, np.atleast_2d(A), delimiter=",", fmt="%.17g")


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return str(v)


def write_rows_csv(path, rows, columns=None) -> None:
    """Write dict rows with a fixed column order; floats use ``repr`` (round-trip exact)."""
    rows = list(rows)
    if columns is None:
        columns = list(rows[0]) if rows else []
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(row[c]) for c in columns])


def read_rows_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_jsonl(path, records) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(jsonable(rec), sort_keys=True) + "\n")
