"""Discrete residuals of the continuity and Euler equations.

Given two snapshots on the same Eulerian grid at t and t + dt, the time
derivative is a forward difference and space derivatives are second-order
central differences (``np.gradient``) of the earlier snapshot.  The
residuals are therefore first order in dt:

    spherical:  d_t(r^2 rho) + d_r(r^2 rho v),   d_t v + v d_r v + 4 pi gamma m / r^2
    planar:     d_t rho + d_x(rho v),           d_t v + v d_x v + 4 pi gamma g
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gravgas.errors import GridMismatch
from gravgas.fields import PLANAR, SPHERICAL


@dataclass(frozen=True, eq=False)
class ResidualNorms:
    continuity_max: float
    continuity_rms: float
    momentum_max: float
    momentum_rms: float
    continuity: np.ndarray
    momentum: np.ndarray


def _norms(r):
    if r.size == 0:
        return 0.0, 0.0
    return float(np.max(np.abs(r))), float(np.sqrt(np.mean(r * r)))


def residual_check(a, b, geometry=None, gamma=1.0, mask=None):
    """Continuity and momentum residuals between snapshots ``a`` and ``b``.

    Parameters
    ----------
    geometry : {"spherical", "planar"}, optional
        Defaults to the geometry recorded in the snapshots.
    mask : boolean array, optional
        Grid points to include in the norms (e.g. the interior of a slab,
        away from the moving edges).  The full residual arrays are returned
        regardless.

    Raises
    ------
    GridMismatch
        If the grids differ, the geometries disagree or ``b`` is not later
        than ``a``.
    """
    geometry = geometry or a.geometry
    if geometry not in (SPHERICAL, PLANAR):
        raise ValueError(f"unknown geometry {geometry!r}")
    if a.geometry != b.geometry or a.geometry != geometry:
        raise GridMismatch("snapshots have different geometries")
    if a.coord.shape != b.coord.shape or not np.array_equal(a.coord, b.coord):
        raise GridMismatch("snapshots are on different grids")
    if a.coord.size < 3:
        raise GridMismatch("need at least 3 grid points")
    dt = b.t - a.t
    if not dt > 0:
        raise GridMismatch("second snapshot must be later than the first")

    x = a.coord
    if geometry == SPHERICAL:
        w = x * x
        force = 4.0 * math.pi * gamma * a.cumulative / w
    else:
        w = np.ones_like(x)
        force = 4.0 * math.pi * gamma * a.cumulative
    cont = (w * b.density - w * a.density) / dt + np.gradient(w * a.density * a.velocity, x, edge_order=2)
    mom = (b.velocity - a.velocity) / dt + a.velocity * np.gradient(a.velocity, x, edge_order=2) + force

    sel = np.ones(x.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    c_max, c_rms = _norms(cont[sel])
    m_max, m_rms = _norms(mom[sel])
    return ResidualNorms(c_max, c_rms, m_max, m_rms, cont, mom)
