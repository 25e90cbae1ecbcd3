"""CSV output of field snapshots and tabular reports.

Floats are written with 17 significant digits, which round-trips every
double exactly, and rows are emitted in grid order so identical inputs give
identical bytes.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from gravgas.fields import PLANAR, SPHERICAL, FieldSnapshot, SlabState, SphericalState

SNAPSHOT_HEADER = ("t", "coord", "density", "velocity", "cumulative")


def fmt(value):
    """17-significant-digit text for a float; ints and strings pass through."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def write_rows(path, header, rows):
    path = Path(path)
    with path.open("w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def emit_snapshot(state, path):
    """Write ``state`` as CSV with header ``t,coord,density,velocity,cumulative``."""
    n = len(state)
    t = np.full(n, state.t)
    rows = zip(t, state.coord, state.density, state.velocity, state.cumulative)
    return write_rows(path, SNAPSHOT_HEADER, rows)


def read_snapshot(path, geometry=SPHERICAL):
    """Parse a snapshot CSV written by :func:`emit_snapshot`."""
    with Path(path).open(newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != SNAPSHOT_HEADER:
            raise ValueError(f"unexpected snapshot header {header!r}")
        data = np.array([[float(v) for v in row] for row in reader], dtype=float).reshape(-1, 5)
    t = float(data[0, 0]) if data.shape[0] else 0.0
    cls = SlabState if geometry == PLANAR else SphericalState
    if geometry not in (PLANAR, SPHERICAL):
        return FieldSnapshot(t, data[:, 1], data[:, 2], data[:, 3], data[:, 4], geometry)
    return cls(t, data[:, 1], data[:, 2], data[:, 3], data[:, 4])
