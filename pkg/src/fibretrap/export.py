"""Deterministic CSV / JSON writers shared by the grid and report outputs."""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _fmt(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    return repr(v)


def grid_csv_text(columns, rows, header=()):
    """Render rows as comma-separated text with '#'-prefixed header lines.

    ``columns`` names the fields; it becomes the ``# columns:`` line.
    """
    lines = [f"# {h}" for h in header]
    lines.append("# columns: " + ", ".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def plane_rows(x, y, values):
    """Row-major (x outer, y inner) long-format rows of a 2D grid."""
    values = np.asarray(values)
    for i, xi in enumerate(x):
        for j, yj in enumerate(y):
            yield (xi, yj, values[i, j])


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def json_text(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=True) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj
