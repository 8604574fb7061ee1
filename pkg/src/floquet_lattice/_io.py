"""CSV/JSON writers shared by the export functions."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def _fmt(value):
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def write_csv(path, header, rows):
    """Write ``rows`` under ``header`` with 17 significant digits and LF endings."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_default, allow_nan=True)
        fh.write("\n")
    return path


def read_csv(path):
    """Read a CSV written by :func:`write_csv` into ``(header, float array)``."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data
