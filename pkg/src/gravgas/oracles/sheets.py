"""Exact event-driven integrator for a system of parallel gravitating sheets.

A sheet feels the acceleration -4 pi gamma g, with g half the difference of
the mass below and above it.  The force only changes when two sheets cross,
so between crossings every sheet moves on an explicit parabola.  Crossing
times of neighbours are roots of quadratics; the integrator jumps from one
crossing to the next and has no discretization error.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from gravgas.errors import DegenerateCrossing
from gravgas.profiles import planar_g


@dataclass(frozen=True, eq=False)
class SheetSystem:
    """Sheets ordered by position; ``masses`` may be a scalar (equal masses)."""

    positions: np.ndarray
    velocities: np.ndarray
    masses: np.ndarray
    gamma: float

    def __post_init__(self):
        x = np.asarray(self.positions, dtype=float)
        u = np.asarray(self.velocities, dtype=float)
        mu = np.broadcast_to(np.asarray(self.masses, dtype=float), x.shape).copy()
        if x.shape != u.shape or x.ndim != 1:
            raise ValueError("positions and velocities must be 1-D arrays of equal length")
        if np.any(np.diff(x) <= 0):
            raise ValueError("sheet positions must be strictly increasing")
        if np.any(mu <= 0):
            raise ValueError("sheet masses must be positive")
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "velocities", u)
        object.__setattr__(self, "masses", mu)

    def __len__(self):
        return self.positions.size

    @classmethod
    def from_profile(cls, rho0, v0, gamma, n):
        """``n`` equal-mass sheets at the mass-quantile midpoints of ``rho0``.

        With this placement the discrete g of sheet k equals the continuum
        g(f_k), so before any crossing each sheet follows the exact
        characteristic of its label.
        """
        g = planar_g(rho0)
        total = g.total
        if total <= 0:
            raise ValueError("density profile carries no mass")
        levels = (np.arange(n) + 0.5) * (total / n) - 0.5 * total
        labels = g.inverse(levels)
        vel = np.zeros(n) if v0 is None else np.asarray(v0.evaluate(labels), dtype=float)
        return cls(labels, vel, total / n, gamma)

    def accelerations(self):
        return _accelerations(self.masses, self.gamma)


def _accelerations(ordered_masses, gamma):
    """Accelerations by ordered position.

    With equal masses the result is c (2p - n + 1), which is exactly
    antisymmetric in floating point, so the forces sum to zero bitwise.
    """
    mu = np.asarray(ordered_masses, dtype=float)
    n = mu.size
    if n and np.all(mu == mu[0]):
        return -2.0 * math.pi * gamma * mu[0] * (2.0 * np.arange(n) - (n - 1))
    below = np.concatenate([[0.0], np.cumsum(mu)[:-1]])
    above = np.concatenate([np.cumsum(mu[::-1])[::-1][1:], [0.0]])
    return -2.0 * math.pi * gamma * (below - above)


@dataclass(frozen=True)
class SheetEvent:
    kind: str  # "crossing" or "degenerate"
    time: float
    sheets: tuple


@dataclass(eq=False)
class SheetRun:
    """Output of :func:`sheet_integrate`.

    Arrays in ``snapshots`` are indexed by sheet id (the initial ordering),
    not by current position.
    """

    times: np.ndarray
    positions: list
    velocities: list
    events: list = field(repr=False)
    n_crossings: int = 0
    masses: np.ndarray = None

    def snapshot(self, i):
        return self.positions[i], self.velocities[i]

    def momentum(self, i):
        return float(math.fsum(self.masses * self.velocities[i]))


def _larger_root(dx, du, da):
    """Larger root of da/2 tau^2 + du tau + dx = 0 for da < 0."""
    a = 0.5 * da
    disc = max(du * du - 4.0 * a * dx, 0.0)
    sq = math.sqrt(disc)
    if du >= 0:
        return (-du - sq) / (2.0 * a)
    return 2.0 * dx / (-du + sq)


def sheet_integrate(initial, t_end, output_times=None, simultaneity_tol=1e-12, max_events=10**7,
                    strict=False):
    """Advance the sheets exactly to ``t_end``.

    Crossings of neighbouring sheets are processed in time order.  When
    more than two sheets meet within ``simultaneity_tol`` (relative) of the
    same instant the group is re-sorted by velocity (stable on ties) and the
    accelerations are reassigned; such events are recorded with kind
    ``"degenerate"``, or raised as :class:`DegenerateCrossing` when
    ``strict`` is set.

    Parameters
    ----------
    output_times : sequence of float, optional
        Times at which to record positions and velocities; ``t_end`` is
        always recorded last.
    """
    n = len(initial)
    two_pi_g = 2.0 * math.pi * initial.gamma
    mass = initial.masses.tolist()
    total = math.fsum(mass)
    # Per-sheet parabola x0 + u0 (t - t0) + a (t - t0)^2 / 2, indexed by sheet id.
    x0 = initial.positions.tolist()
    u0 = initial.velocities.tolist()
    t0 = [0.0] * n
    a = _accelerations(initial.masses, initial.gamma).tolist()
    # Equal masses: the force at each ordered slot never changes, sheets just trade slots.
    a_pos = list(a) if len(set(mass)) == 1 else None
    order = list(range(n))
    version = [0] * n
    # mass_below[p]: mass of the sheets at ordered positions < p
    mass_below = [0.0]
    for k in order:
        mass_below.append(mass_below[-1] + mass[k])

    def position_of(k, t):
        dt = t - t0[k]
        return x0[k] + u0[k] * dt + 0.5 * a[k] * dt * dt

    def velocity_of(k, t):
        return u0[k] + a[k] * (t - t0[k])

    heap = []

    def schedule(p, now):
        if p < 0 or p >= n - 1:
            return
        i, j = order[p], order[p + 1]
        da = a[j] - a[i]
        if da >= 0.0:
            return
        tau = _larger_root(position_of(j, now) - position_of(i, now),
                           velocity_of(j, now) - velocity_of(i, now), da)
        if tau > 0.0 and math.isfinite(tau):
            heapq.heappush(heap, (now + tau, p, i, j, version[i], version[j]))

    for p in range(n - 1):
        schedule(p, 0.0)

    out_times = () if output_times is None else output_times
    times = sorted(set(float(t) for t in out_times if 0 <= t <= t_end) | {float(t_end)})
    snap_x, snap_u = [], []
    events = []
    n_cross = 0
    out_k = 0

    def valid(ev):
        _, p, i, j, vi, vj = ev
        return order[p] == i and order[p + 1] == j and version[i] == vi and version[j] == vj

    def snapshot(t):
        dt = t - np.array(t0)
        av = np.array(a)
        snap_x.append(np.array(x0) + np.array(u0) * dt + 0.5 * av * dt * dt)
        snap_u.append(np.array(u0) + av * dt)

    while True:
        while heap and not valid(heap[0]):
            heapq.heappop(heap)
        t_next = heap[0][0] if heap else math.inf
        while out_k < len(times) and times[out_k] <= t_next:
            snapshot(times[out_k])
            out_k += 1
        if out_k == len(times):
            break
        if n_cross >= max_events:
            raise RuntimeError("sheet integrator exceeded max_events")

        first = heapq.heappop(heap)
        te = first[0]
        window = te + simultaneity_tol * max(1.0, abs(te))
        pairs = {first[1]}
        while heap and heap[0][0] <= window:
            ev = heapq.heappop(heap)
            if valid(ev):
                pairs.add(ev[1])

        # Group adjacent pairs into runs of positions [lo, hi].
        runs = []
        for p in sorted(pairs):
            if runs and p <= runs[-1][1]:
                runs[-1][1] = p + 1
            else:
                runs.append([p, p + 1])

        for lo, hi in runs:
            ids = order[lo:hi + 1]
            xs = [position_of(k, te) for k in ids]
            us = [velocity_of(k, te) for k in ids]
            meet = math.fsum(xs) / len(xs)
            if len(ids) == 2:
                new = [(ids[1], us[1]), (ids[0], us[0])]
                events.append(SheetEvent("crossing", te, tuple(ids)))
            else:
                if strict:
                    raise DegenerateCrossing(f"{len(ids)} sheets met at t = {te!r}", time=te, sheets=ids)
                # Slowest first; ties keep their current order.
                new = sorted(zip(ids, us), key=lambda item: item[1])
                events.append(SheetEvent("degenerate", te, tuple(ids)))
            n_cross += 1
            below = mass_below[lo]
            for q, (k, u) in enumerate(new):
                order[lo + q] = k
                if a_pos is not None:
                    a[k] = a_pos[lo + q]
                else:
                    above = total - below - mass[k]
                    a[k] = -two_pi_g * (below - above)
                    below += mass[k]
                    mass_below[lo + q + 1] = below
                x0[k] = meet
                u0[k] = u
                t0[k] = te
                version[k] += 1
            for p in range(lo - 1, hi + 1):
                schedule(p, te)

    return SheetRun(np.array(times), snap_x, snap_u, events, n_cross, np.array(mass))


def sheet_density(positions, masses):
    """Centred density estimate at each sheet, (m_{k-1}/2 + m_k + m_{k+1}/2) / (x_{k+1} - x_{k-1}).

    Positions must be sorted; the two end sheets get NaN.
    """
    x = np.asarray(positions, dtype=float)
    mu = np.broadcast_to(np.asarray(masses, dtype=float), x.shape)
    out = np.full(x.shape, math.nan)
    out[1:-1] = (0.5 * mu[:-2] + mu[1:-1] + 0.5 * mu[2:]) / (x[2:] - x[:-2])
    return out
