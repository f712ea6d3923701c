"""CSV serialisation of sampled fields.

Format: a header ``x,t,value`` followed by one row per grid point, time
major (all x at the first time, then all x at the next time, ...). Values
are written with 17 significant digits, which round-trips IEEE doubles
exactly.
"""

import csv
import os

import numpy as np

from .errors import DomainError
from .linear import Field

HEADER = ("x", "t", "value")


def _g17(v):
    return format(float(v), ".17g")


def write_field_csv(field, path):
    """Write ``field`` to ``path``; refuses non-finite values."""
    values = np.asarray(field.values, dtype=float)
    bad = ~np.isfinite(values)
    if np.any(bad):
        k, j = np.argwhere(bad)[0]
        raise DomainError(
            f"refusing to write {int(bad.sum())} non-finite values to {path}; first at "
            f"x={field.grid_x[j]}, t={field.grid_t[k]}")
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise FileNotFoundError(f"output directory {parent} does not exist")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for k, t in enumerate(field.grid_t):
            ts = _g17(t)
            for j, x in enumerate(field.grid_x):
                w.writerow((_g17(x), ts, _g17(values[k, j])))


def read_field_csv(path, meta=None):
    """Inverse of :func:`write_field_csv`."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != HEADER:
        raise DomainError(f"{path}: expected header {','.join(HEADER)}")
    data = np.array(rows[1:], dtype=float).reshape(-1, 3)
    ts = np.unique(data[:, 1])
    xs = data[: data.shape[0] // max(ts.size, 1), 0]
    if xs.size * ts.size != data.shape[0]:
        raise DomainError(f"{path}: rows do not form a full x-t grid")
    values = data[:, 2].reshape(ts.size, xs.size)
    return Field(xs, ts, values, dict(meta or {}))


__all__ = ["write_field_csv", "read_field_csv"]
