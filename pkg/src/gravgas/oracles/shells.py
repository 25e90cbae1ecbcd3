"""Lagrangian shell integrator for spherical cold collapse.

Each shell carries a fixed enclosed mass and obeys r'' = -4 pi gamma m / r^2
until shells cross.  Shells are therefore independent ODEs and are
integrated one by one with an adaptive embedded Runge-Kutta pair (scipy's
DOP853).

To keep the error under control all the way down to the guard radius, the
integration uses a Sundman time transform dt = r^(3/2) ds with state
(t, r, w), w = v sqrt(r):

    dt/ds = r^(3/2),   dr/ds = r w,   dw/ds = w^2 / 2 - 4 pi gamma m.

The right-hand side stays bounded as r -> 0 and the steps shrink with the
free-fall time of the shell.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from gravgas.errors import ShellCrossing, StepFailure

DEFAULT_RTOL = 3e-14
DEFAULT_ATOL = 1e-20
GUARD_FRACTION = 1e-6
S_MAX = 1e12


def thread_count(default=1):
    """Worker cap from ``GRAVGAS_THREADS`` (positive int), else ``default``."""
    raw = os.environ.get("GRAVGAS_THREADS")
    if not raw:
        return default
    try:
        n = int(raw)
    except ValueError:
        return default
    return max(1, n)


@dataclass(frozen=True, eq=False)
class ShellSystem:
    """Initial shells: labels, enclosed masses, radii, velocities."""

    labels: np.ndarray
    masses: np.ndarray
    radii: np.ndarray
    velocities: np.ndarray
    gamma: float

    def __post_init__(self):
        for name in ("labels", "masses", "radii", "velocities"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if np.any(self.radii <= 0):
            raise ValueError("shell radii must be positive")
        if np.any(self.masses < 0) or np.any(np.diff(self.masses) < 0):
            raise ValueError("enclosed masses must be nonnegative and nondecreasing")
        if np.any(np.diff(self.radii) <= 0):
            raise ValueError("shells must start strictly ordered in radius")

    @classmethod
    def from_profile(cls, m, gamma, labels, v0=None):
        """Shells at ``labels`` carrying the enclosed mass m(label); cold unless ``v0`` given."""
        labels = np.asarray(labels, dtype=float)
        vel = np.zeros_like(labels) if v0 is None else np.asarray(v0.evaluate(labels), dtype=float)
        return cls(labels, m.evaluate(labels), labels.copy(), vel, gamma)

    def energies(self):
        return 0.5 * self.velocities**2 - 4.0 * math.pi * self.gamma * self.masses / self.radii

    def __len__(self):
        return self.labels.size


@dataclass(frozen=True)
class ShellEvent:
    kind: str  # "collapse" or "crossing"
    time: float
    shells: tuple


def regularized_rhs(gm):
    def rhs(s, y):
        t, r, w = y
        return [r * math.sqrt(r), r * w, 0.5 * w * w - gm]

    return rhs


def integrate_regularized(gm, r0, v0, s_end, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                          method="DOP853", fixed_step=None, events=None, dense_output=False):
    """Integrate one shell in the regularized variable s from 0 to ``s_end``.

    ``gm`` is 4 pi gamma m.  With ``fixed_step`` the error control is
    switched off and every step has that length in s (used for order
    measurements).
    """
    y0 = [0.0, float(r0), float(v0) * math.sqrt(r0)]
    kw = dict(method=method, events=events, dense_output=dense_output)
    if fixed_step is None:
        kw.update(rtol=rtol, atol=atol)
    else:
        kw.update(rtol=1e3, atol=1e30, first_step=fixed_step, max_step=fixed_step)
    sol = solve_ivp(regularized_rhs(gm), (0.0, s_end), y0, **kw)
    if sol.status == -1:
        raise StepFailure(sol.message)
    return sol


class _Shell:
    """Trajectory of one shell, queried in physical time."""

    def __init__(self, t, r, v, end_time, collapsed, sol=None, ballistic=None):
        self.t = t
        self.r = r
        self.v = v
        self.end_time = end_time
        self.collapsed = collapsed
        self._sol = sol
        self._ballistic = ballistic
        self._spline = CubicHermiteSpline(t, r, v) if t.size >= 2 else None
        self._t_raw = sol.y[0] if sol is not None else t

    def state(self, t):
        """(r, v) at physical time ``t``, solved exactly on the dense output."""
        if t > self.end_time:
            return math.nan, math.nan
        if self._ballistic is not None:
            r0, v0 = self._ballistic
            return r0 + v0 * t, v0
        k = int(np.searchsorted(self._t_raw, t))
        k = min(max(k, 1), self._t_raw.size - 1)
        s_lo, s_hi = self._sol.t[k - 1], self._sol.t[k]
        s = brentq(lambda q: self._sol.sol(q)[0] - t, s_lo, s_hi,
                   xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
        _, r, w = self._sol.sol(s)
        return float(r), float(w / math.sqrt(r))

    def radius_interp(self, t):
        if self._ballistic is not None:
            r0, v0 = self._ballistic
            return r0 + v0 * np.asarray(t)
        return self._spline(t)


@dataclass(eq=False)
class ShellTrajectory:
    """Result of :func:`shell_integrate`."""

    system: ShellSystem
    t_end: float
    guard: float
    shells: list = field(repr=False)
    events: list
    energy_drift: np.ndarray
    collapse_times: np.ndarray
    crossing_time: float

    def state(self, t):
        """Radii and velocities of all shells at ``t``; NaN for shells already at the guard.

        Raises
        ------
        ShellCrossing
            If ``t`` is past the first detected crossing.
        """
        if t > self.crossing_time:
            raise ShellCrossing(f"shells crossed at t = {self.crossing_time!r}", time=self.crossing_time)
        out = np.array([sh.state(t) for sh in self.shells])
        return out[:, 0], out[:, 1]

    def radii(self, t):
        return self.state(t)[0]


def _integrate_one(gm, r0, v0, t_end, guard, rtol, atol, method):
    if gm == 0.0:
        end = t_end
        collapsed = False
        if v0 < 0 and r0 + v0 * t_end <= guard:
            end = (guard - r0) / v0
            collapsed = True
        t = np.array([0.0, end])
        return _Shell(t, r0 + v0 * t, np.full(2, v0), end, collapsed, ballistic=(r0, v0)), 0.0

    def hit_guard(s, y):
        return y[1] - guard

    hit_guard.terminal = True
    hit_guard.direction = -1

    # stop a little past t_end so the event's rounding cannot leave t_end uncovered
    t_stop = t_end + 1e-9 * max(t_end, 1.0)

    def hit_end(s, y):
        return y[0] - t_stop

    hit_end.terminal = True
    hit_end.direction = 1

    sol = integrate_regularized(gm, r0, v0, S_MAX, rtol=rtol, atol=atol, method=method,
                                events=[hit_guard, hit_end], dense_output=True)
    t, r, w = sol.y
    v = w / np.sqrt(r)
    e = 0.5 * v * v - gm / r
    e0 = e[0] if e[0] != 0 else gm / r0
    drift = float(np.max(np.abs(e - e[0])) / abs(e0))
    collapsed = sol.t_events[0].size > 0
    end = float(t[-1])
    keep = np.concatenate([[True], np.diff(t) > 0])
    return _Shell(t[keep], r[keep], v[keep], end, collapsed, sol=sol), drift


def _first_crossing(a, b, t_stop):
    """Earliest t <= t_stop with r_b(t) <= r_a(t) (b starts outside a), or inf."""
    ts = np.union1d(a.t, b.t)
    ts = ts[ts <= t_stop]
    if ts.size == 0 or ts[-1] < t_stop:
        ts = np.append(ts, t_stop)
    gap = b.radius_interp(ts) - a.radius_interp(ts)
    bad = np.flatnonzero(gap <= 0)
    if bad.size == 0:
        return math.inf
    k = bad[0]
    if k == 0:
        return 0.0
    return brentq(lambda q: float(b.radius_interp(q) - a.radius_interp(q)), ts[k - 1], ts[k], xtol=1e-14)


def shell_integrate(initial, t_end, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, guard=None,
                    method="DOP853", workers=None):
    """Integrate every shell of ``initial`` up to ``t_end`` or its guard radius.

    Parameters
    ----------
    guard : float, optional
        Collapse guard radius; default 1e-6 times the outermost initial radius.
    workers : int, optional
        Thread cap; defaults to ``GRAVGAS_THREADS`` or 1.

    Returns
    -------
    ShellTrajectory
        Per-shell dense trajectories, collapse times (NaN when the shell did
        not reach the guard), relative energy drift per shell and the events
        found: "collapse" per shell reaching the guard, and the first
        "crossing" of neighbouring shells.

    Raises
    ------
    StepFailure
        If the step-size control cannot meet the tolerance.
    """
    guard = GUARD_FRACTION * float(initial.radii[-1]) if guard is None else float(guard)
    gms = 4.0 * math.pi * initial.gamma * initial.masses
    args = [(float(gm), float(r0), float(v0), float(t_end), guard, rtol, atol, method)
            for gm, r0, v0 in zip(gms, initial.radii, initial.velocities)]
    n_workers = workers or thread_count()
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(lambda a: _integrate_one(*a), args))
    else:
        results = [_integrate_one(*a) for a in args]
    shells = [res[0] for res in results]
    drift = np.array([res[1] for res in results])
    collapse_times = np.array([sh.end_time if sh.collapsed else math.nan for sh in shells])

    events = [ShellEvent("collapse", float(ct), (j,)) for j, ct in enumerate(collapse_times)
              if np.isfinite(ct)]
    crossing = math.inf
    pair = None
    for j in range(len(shells) - 1):
        a, b = shells[j], shells[j + 1]
        t_stop = min(a.end_time, b.end_time)
        tc = _first_crossing(a, b, t_stop)
        if tc < crossing:
            crossing, pair = tc, (j, j + 1)
    if pair is not None:
        events.append(ShellEvent("crossing", crossing, pair))
    events.sort(key=lambda e: e.time)
    return ShellTrajectory(initial, float(t_end), guard, shells, events, drift, collapse_times, crossing)


def shell_density(radii, masses):
    """Density estimate from neighbouring shells, rho = 3 dm / d(r^3) (centred; NaN at the ends)."""
    radii = np.asarray(radii, dtype=float)
    masses = np.asarray(masses, dtype=float)
    out = np.full(radii.shape, math.nan)
    out[1:-1] = 3.0 * (masses[2:] - masses[:-2]) / (radii[2:] ** 3 - radii[:-2] ** 3)
    return out
