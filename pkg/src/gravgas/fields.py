"""Snapshot containers shared by the analytic solvers and the oracles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPHERICAL = "spherical"
PLANAR = "planar"


@dataclass(frozen=True, eq=False)
class FieldSnapshot:
    """Fields on a grid at one instant.

    ``cumulative`` holds m(r, t) in spherical geometry and g(x, t) in planar
    geometry.  ``labels`` are the comoving labels f of the grid points when
    known.
    """

    t: float
    coord: np.ndarray
    density: np.ndarray
    velocity: np.ndarray
    cumulative: np.ndarray
    geometry: str
    labels: np.ndarray | None = None

    def __post_init__(self):
        for name in ("coord", "density", "velocity", "cumulative"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.coord.shape
        if not (self.density.shape == n == self.velocity.shape == self.cumulative.shape):
            raise ValueError("snapshot fields must share the grid shape")
        object.__setattr__(self, "t", float(self.t))

    def __len__(self):
        return self.coord.size


@dataclass(frozen=True, eq=False)
class SphericalState(FieldSnapshot):
    geometry: str = SPHERICAL
    alpha: np.ndarray | None = None

    @property
    def r(self):
        return self.coord

    @property
    def rho(self):
        return self.density

    @property
    def v(self):
        return self.velocity

    @property
    def m(self):
        return self.cumulative


@dataclass(frozen=True, eq=False)
class SlabState(FieldSnapshot):
    geometry: str = PLANAR
    edges: tuple = ()

    @property
    def x(self):
        return self.coord

    @property
    def rho(self):
        return self.density

    @property
    def v(self):
        return self.velocity

    @property
    def g(self):
        return self.cumulative
