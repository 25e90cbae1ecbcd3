"""Exact evolution of cold, spherically symmetric gravitating gas.

Every mass shell labelled by its initial radius f falls on a radial Kepler
orbit parametrized by an angle alpha:

    r = f (1 + cos alpha) / 2,     alpha + sin alpha = -2 t / tau(f),

with tau(f) = sqrt(f^3 / (8 pi gamma m(f))).  For a homogeneous sphere tau
does not depend on f and the density stays uniform.  The enclosed mass is
m(r) = int_0^r r'^2 rho dr', so the radial force per unit mass is
-4 pi gamma m / r^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gravgas.errors import (
    CollapseSingularity,
    NegativeRadicand,
    NoBracket,
    OutOfRange,
    ShellCrossing,
)
from gravgas.fields import SphericalState
from gravgas.profiles import SPHERICAL_MASS

TWO_PI = 2.0 * math.pi

# Newton loses its footing where d(alpha + sin alpha)/d alpha = 1 + cos alpha vanishes.
NEWTON_SWITCH = 1e-4
DEFAULT_GUARD = 1e-8


@dataclass(frozen=True)
class KeplerPhase:
    alpha: float
    t: float
    period_scale: float

    @property
    def residual(self):
        return self.alpha + math.sin(self.alpha) + TWO_PI * self.t / self.period_scale


@dataclass(frozen=True, eq=False)
class SphericalCharacteristic:
    """Characteristic data for labels ``f`` at time ``t`` (arrays broadcast together)."""

    f: np.ndarray
    m_f: np.ndarray
    alpha: np.ndarray
    r: np.ndarray
    v: np.ndarray
    A_f: np.ndarray
    t: float = 0.0


def kepler_solve(y, tol=1e-13, max_iter=200):
    """Solve ``alpha + sin(alpha) = y`` for alpha in (-2 pi, 0].

    Safeguarded Newton iteration on a shrinking bracket; bisection takes
    over whenever the Newton step leaves the bracket or ``1 + cos(alpha)``
    drops below 1e-4.  Works elementwise on arrays.

    Raises
    ------
    OutOfRange
        If any ``y > 0`` or ``y <= -2 pi``.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y > 0.0) or np.any(y <= -TWO_PI) or np.any(np.isnan(y)):
        raise OutOfRange("kepler_solve needs y in (-2 pi, 0]; reduce the phase to the first cycle")
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    lo = np.full_like(y, -TWO_PI)
    hi = np.zeros_like(y)
    # alpha + pi ~ cbrt(6 (y + pi)) around the inflection point.
    a = np.clip(np.cbrt(6.0 * (y + math.pi)) - math.pi, -TWO_PI, 0.0)
    a = np.where(y == 0.0, 0.0, a)
    for _ in range(max_iter):
        h = a + np.sin(a) - y
        done = (np.abs(h) < tol) | (hi - lo <= 4 * np.spacing(TWO_PI))
        if np.all(done):
            break
        hi = np.where(h > 0, np.minimum(hi, a), hi)
        lo = np.where(h < 0, np.maximum(lo, a), lo)
        d = 1.0 + np.cos(a)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = a - h / d
        bisect = (d < NEWTON_SWITCH) | ~((newton > lo) & (newton < hi))
        a = np.where(done, a, np.where(bisect, 0.5 * (lo + hi), newton))
    return float(a[0]) if scalar else a


def homogeneous_period(rho0, gamma):
    """Oscillation period T = pi sqrt(3 / (8 pi gamma rho0)); collapse happens at T/2."""
    if rho0 <= 0 or gamma <= 0:
        raise ValueError("rho0 and gamma must be positive")
    return math.pi * math.sqrt(3.0 / (8.0 * math.pi * gamma * rho0))


def homogeneous_collapse_time(rho0, gamma):
    return 0.5 * homogeneous_period(rho0, gamma)


def free_fall_scale(f, m_f, gamma):
    """tau(f) = sqrt(f^3 / (8 pi gamma m(f))); infinite for an empty interior."""
    f = np.asarray(f, dtype=float)
    m_f = np.asarray(m_f, dtype=float)
    with np.errstate(divide="ignore"):
        return np.sqrt(f**3 / (8.0 * math.pi * gamma * m_f))


def label_collapse_time(f, m_f, gamma):
    """Time for a cold shell starting at rest at radius ``f`` to reach the centre."""
    return 0.5 * math.pi * free_fall_scale(f, m_f, gamma)


def collapse_time(m, gamma, labels):
    """Earliest collapse among ``labels`` assuming no shell crossing."""
    labels = np.asarray(labels, dtype=float)
    labels = labels[labels > 0]
    t = label_collapse_time(labels, m.evaluate(labels), gamma)
    return float(np.min(t)) if t.size else math.inf


def energy_function(f, m_f, v0_f, gamma):
    """A(f) = v0(f)^2 / 2 - 4 pi gamma m(f) / f, conserved along each characteristic."""
    f = np.asarray(f, dtype=float)
    return 0.5 * np.asarray(v0_f, dtype=float) ** 2 - 4.0 * math.pi * gamma * np.asarray(m_f) / f


def velocity_from_energy(f, r, m_f, v0_f, gamma):
    """Radial velocity of the shell labelled ``f`` when it sits at radius ``r``.

    The magnitude follows from energy conservation along the characteristic,
    the sign is negative (infall branch).

    Raises
    ------
    NegativeRadicand
        If ``(f, r)`` lies in the classically forbidden region.
    """
    f = np.asarray(f, dtype=float)
    r = np.asarray(r, dtype=float)
    v0_f = np.asarray(v0_f, dtype=float)
    # (f - r) / (r f) avoids cancelling 1/r - 1/f.
    radicand = v0_f**2 + 8.0 * math.pi * gamma * np.asarray(m_f, dtype=float) * (f - r) / (r * f)
    if np.any(radicand < 0):
        raise NegativeRadicand("negative radicand: radius outside the reachable region for this label")
    out = -np.sqrt(radicand)
    return out[()] if out.ndim == 0 else out


def _check_time(t):
    if not np.isfinite(t) or t < 0:
        raise ValueError("time must be finite and nonnegative")


def homogeneous_state(rho0, gamma, t, r_grid, guard=DEFAULT_GUARD, periodic=False, tol=1e-14):
    """Closed-form state of an initially static homogeneous sphere.

    Density is uniform, rho0 (2 / (1 + cos alpha))^3.  The velocity comes from
    differentiating f = 2 r / (1 + cos alpha) through the Kepler phase,
    v = -d_t f / d_r f = 2 pi r sin(alpha) / (T (1 + cos alpha)^2), which
    carries the squared denominator.

    With ``periodic=True`` the solution is continued through the bounce: the
    phase is reduced modulo the period T and both the infall and re-expansion
    halves of the cycle are returned.

    Raises
    ------
    CollapseSingularity
        If ``1 + cos alpha`` is within ``guard`` of zero, or (non-periodic) if
        ``t`` is at or past the collapse time T/2.
    """
    _check_time(t)
    r = np.asarray(r_grid, dtype=float)
    T = homogeneous_period(rho0, gamma)
    t_c = 0.5 * T
    if periodic:
        t_red = math.fmod(t, T)
    else:
        if t >= t_c:
            raise CollapseSingularity(f"homogeneous sphere collapses at t = {t_c!r}", time=t_c)
        t_red = t
    alpha = kepler_solve(-TWO_PI * t_red / T, tol=tol)
    c = 1.0 + math.cos(alpha)
    if c < guard:
        raise CollapseSingularity(f"1 + cos(alpha) = {c:.3e} below guard near t = {t_c!r}", time=t_c)
    scale = 2.0 / c
    f = r * scale
    rho = np.full_like(r, rho0 * scale**3)
    v = TWO_PI * r * math.sin(alpha) / (T * c * c)
    m = rho0 * f**3 / 3.0
    return SphericalState(t, r, rho, v, m, labels=f, alpha=np.full_like(r, alpha))


def _forward(m, gamma, f, t, tol):
    """Kepler angle and radius for labels ``f``; y <= -pi flags a collapsed label."""
    m_f = m.evaluate(f)
    tau = free_fall_scale(f, m_f, gamma)
    y = -2.0 * t / tau
    alpha = kepler_solve(np.maximum(y, -math.pi), tol=tol)
    r = f * (1.0 + np.cos(alpha)) / 2.0
    return m_f, tau, y, alpha, r


def characteristic(m, gamma, f, t, tol=1e-14):
    """Forward map of cold labels ``f`` to time ``t`` (first infall branch).

    Raises
    ------
    CollapseSingularity
        If any label has reached the centre by ``t``.
    """
    if m.role != SPHERICAL_MASS:
        raise ValueError("characteristic needs a spherical-mass cumulative profile")
    _check_time(t)
    f = np.asarray(f, dtype=float)
    m_f, tau, y, alpha, r = _forward(m, gamma, f, t, tol)
    if np.any(y <= -math.pi):
        raise CollapseSingularity("a label reached the centre", time=collapse_time(m, gamma, f))
    v = velocity_from_energy(f, r, m_f, 0.0, gamma)
    return SphericalCharacteristic(f, m_f, alpha, r, v, energy_function(f, m_f, 0.0, gamma), t=t)


def _label_grid(m, f_lo, f_hi, extra, n):
    knots = m.knots[(m.knots > f_lo) & (m.knots < f_hi)]
    g = np.unique(np.concatenate([np.linspace(f_lo, f_hi, n), knots, extra]))
    # near-duplicate labels would make rounding in r look like a crossing
    keep = np.concatenate([[True], np.diff(g) > 1e-9 * (f_hi - f_lo)])
    return g[keep]


def _is_single_stream(m, gamma, labels, t, tol):
    _, _, y, _, r = _forward(m, gamma, labels, t, tol)
    return bool(np.all(y > -math.pi) and np.all(np.diff(r) > 0))


def shell_crossing_time(m, gamma, labels, t_hi, rtol=1e-6, tol=1e-14):
    """Bisect the earliest time at which ``r(f, t)`` stops increasing over ``labels``.

    Returns ``t_hi`` when the map is still monotone there.  The bracket is
    narrowed to ``rtol`` times the shortest label collapse time.
    """
    labels = np.asarray(labels, dtype=float)
    if _is_single_stream(m, gamma, labels, t_hi, tol):
        return float(t_hi)
    scale = collapse_time(m, gamma, labels)
    width = rtol * (scale if np.isfinite(scale) else t_hi)
    lo, hi = 0.0, float(t_hi)
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if _is_single_stream(m, gamma, labels, mid, tol):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def cold_collapse_state(m, gamma, t, r_grid, tol=1e-14, guard=DEFAULT_GUARD, label_points=None):
    """Exact state at time ``t`` of a sphere released from rest with enclosed mass ``m``.

    For every output radius the label f is found by a bracketed monotone
    root solve of r(f, t) = r.  Density follows from the chain rule,
    rho = m'(f) / (r^2 dr/df), with dr/df taken analytically through the
    Kepler phase.

    Parameters
    ----------
    m : CumulativeProfile
        Spherical-mass profile of the initial density.
    r_grid : array_like
        Positive output radii.
    label_points : int, optional
        Size of the label grid used for the shell-crossing test
        (default ``4 * len(r_grid) + 1``).

    Raises
    ------
    CollapseSingularity
        If a label in the sampled range reaches ``1 + cos alpha < guard``.
    ShellCrossing
        If r(f, t) is not strictly increasing over the label grid; the
        exception carries the bisected crossing time.
    """
    if m.role != SPHERICAL_MASS:
        raise ValueError("cold_collapse_state needs a spherical-mass cumulative profile")
    _check_time(t)
    r = np.asarray(r_grid, dtype=float)
    if not np.all(np.isfinite(r) & (r > 0)):
        raise ValueError("output radii must be finite and positive")
    if t == 0.0:
        f = r.copy()
        rho = m.integrand(f) / f**2
        zeros = np.zeros_like(r)
        return SphericalState(0.0, r, rho, zeros, m.evaluate(f), labels=f, alpha=zeros)

    # Bracket: r(f, t) <= f, so f >= r; grow the upper end until it passes r.
    lo = r.copy()
    hi = 2.0 * r
    for _ in range(200):
        _, _, y_hi, _, r_hi = _forward(m, gamma, hi, t, tol)
        short = (r_hi < r) | (y_hi <= -math.pi)
        if not np.any(short):
            break
        hi = np.where(short, 2.0 * hi, hi)
    else:
        if np.all(y_hi[short] <= -math.pi):
            t_col = collapse_time(m, gamma, np.linspace(0.0, float(hi.max()), 4 * r.size + 1))
            raise CollapseSingularity(f"shells reach the centre at t = {t_col!r}", time=t_col)
        raise NoBracket("could not bracket the label for some output radii")

    n_check = label_points or 4 * r.size + 1
    labels = _label_grid(m, float(r.min()), float(hi.max()), np.concatenate([r, hi]), n_check)
    _, _, y_l, alpha_l, r_l = _forward(m, gamma, labels, t, tol)
    if np.any(y_l <= -math.pi) or np.any(np.diff(r_l) <= 0):
        t_x = shell_crossing_time(m, gamma, labels, t, tol=tol)
        t_col = collapse_time(m, gamma, labels)
        if t_x < t_col * (1.0 - 1e-6):
            raise ShellCrossing(f"shells cross near t = {t_x!r}", time=t_x)
        raise CollapseSingularity(f"shells reach the centre at t = {t_col!r}", time=t_col)
    if np.any(1.0 + np.cos(alpha_l) < guard):
        raise CollapseSingularity(
            f"shells within the guard of the centre at t = {t!r}", time=collapse_time(m, gamma, labels)
        )

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        _, _, _, _, r_mid = _forward(m, gamma, mid, t, tol)
        below = r_mid < r
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= 2 * np.spacing(hi)):
            break
    f = 0.5 * (lo + hi)

    m_f, tau, y, alpha, _ = _forward(m, gamma, f, t, tol)
    c = 1.0 + np.cos(alpha)
    dm = m.integrand(f)
    with np.errstate(divide="ignore", invalid="ignore"):
        dy_df = np.where(m_f > 0, (t / tau) * (3.0 / f - dm / m_f), 0.0)
    dr_df = 0.5 * c - 0.5 * f * np.sin(alpha) * dy_df / c
    rho = dm / (r * r * dr_df)
    v = velocity_from_energy(f, r, m_f, 0.0, gamma)
    return SphericalState(t, r, rho, v, m_f, labels=f, alpha=alpha)
