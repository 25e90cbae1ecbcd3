"""Exact evolution of a planar (slab) configuration of gravitating gas.

In planar symmetry the force on the fluid element labelled f is
-4 pi gamma g(f), constant in time until elements cross.  Its displacement
is therefore known in closed form,

    s(f, t) = -t v0(f) + 2 pi gamma t^2 g(f),     x = f - s(f, t),

and the Eulerian fields follow from inverting x(f) at fixed t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gravgas.errors import CollapseSingularity, NoBracket, SheetCrossing
from gravgas.fields import SlabState
from gravgas.profiles import PLANAR_G, ProfileFunction, planar_g, support

DEFAULT_GUARD = 1e-8


@dataclass(frozen=True, eq=False)
class SlabCharacteristic:
    f: np.ndarray
    g_f: np.ndarray
    v0_f: np.ndarray
    s: np.ndarray
    x: np.ndarray
    t: float = 0.0


def _as_g(g):
    if g.role != PLANAR_G:
        raise ValueError("expected a planar-g cumulative profile")
    return g


def _velocity(v0):
    """``None`` stands for a slab released from rest."""
    return ProfileFunction.zero() if v0 is None else v0


def displacement(f, t, g, v0, gamma):
    """s(f, t) = -t v0(f) + 2 pi gamma t^2 g(f)."""
    _as_g(g)
    v0 = _velocity(v0)
    f = np.asarray(f, dtype=float)
    return -t * v0.evaluate(f) + 2.0 * math.pi * gamma * t * t * g.evaluate(f)


def position(f, t, g, v0, gamma):
    """Eulerian position x = f - s(f, t) of label ``f``."""
    return np.asarray(f, dtype=float) - displacement(f, t, g, v0, gamma)


def characteristic(f, t, g, v0, gamma):
    v0 = _velocity(v0)
    f = np.asarray(f, dtype=float)
    s = displacement(f, t, g, v0, gamma)
    return SlabCharacteristic(f, g.evaluate(f), v0.evaluate(f), s, f - s, t=t)


def jacobian(f, t, rho0, v0, gamma, side=None):
    """dx/df = 1 - ds/df = 1 + t v0'(f) - 2 pi gamma t^2 rho0(f)."""
    v0 = _velocity(v0)
    f = np.asarray(f, dtype=float)
    if side is None:
        rho = np.where(f == rho0.knots[-1], rho0.limit(f, "left"), rho0.limit(f, "right"))
    else:
        rho = rho0.limit(f, side)
    return 1.0 + t * v0.slope(f, side) - 2.0 * math.pi * gamma * t * t * rho


def _breakpoints(rho0, v0):
    return np.union1d(rho0.knots, v0.knots)


def _piece_coefficients(rho0, v0, gamma):
    """(v0', 2 pi gamma rho0) at both sides of every breakpoint.

    dx/df is linear in f between breakpoints, so its extremes sit in this list.
    """
    v0 = _velocity(v0)
    b = _breakpoints(rho0, v0)
    a = np.concatenate([v0.slope(b, "left"), v0.slope(b, "right")])
    q = 2.0 * math.pi * gamma * np.concatenate([rho0.limit(b, "left"), rho0.limit(b, "right")])
    return a, q


def min_jacobian(t, rho0, v0, gamma):
    """Minimum of dx/df over all labels at time ``t`` (exact)."""
    a, q = _piece_coefficients(rho0, v0, gamma)
    return float(min(1.0, np.min(1.0 + t * a - t * t * q)))


def collapse_time(rho0, v0, gamma):
    """Earliest t > 0 at which dx/df first vanishes for some label, or None.

    dx/df = 1 + a t - q t^2 on each piece, so the answer is the smallest
    positive root over all pieces, in closed form.
    """
    a, q = _piece_coefficients(rho0, v0, gamma)
    disc = np.sqrt(a * a + 4.0 * q)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        quad = np.where(a <= 0, 2.0 / (disc - a), (a + disc) / (2.0 * q))
        lin = np.where(a < 0, -1.0 / a, np.inf)
    roots = np.where(q > 0, quad, lin)
    roots = roots[np.isfinite(roots) & (roots > 0)]
    return float(np.min(roots)) if roots.size else None


def characteristic_invert(x, t, g, v0, gamma, tol=0.0, label_range=None):
    """Label f with f - s(f, t) = x, by bracketed bisection.

    Bisection stops once the bracket is narrower than ``tol`` or, with the
    default ``tol=0``, when it spans adjacent floats.

    |s| is bounded by t max|v0| + pi gamma t^2 M, which gives a bracket
    for every x up front.

    Raises
    ------
    SheetCrossing
        If x(f) is not strictly increasing at ``t``.
    NoBracket
        If ``label_range`` is given and x lies outside its image.
    """
    _as_g(g)
    v0 = _velocity(v0)
    rho0 = g.base
    x = np.asarray(x, dtype=float)
    if t == 0.0:
        return x.copy() if x.ndim else float(x)
    if min_jacobian(t, rho0, v0, gamma) <= 0.0:
        raise SheetCrossing(
            f"sheets have crossed before t = {t!r}", time=collapse_time(rho0, v0, gamma)
        )
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    bound = abs(t) * float(np.max(np.abs(v0.values))) + math.pi * gamma * t * t * g.total
    if label_range is not None:
        f_lo, f_hi = map(float, label_range)
        x_lo, x_hi = position(np.array([f_lo, f_hi]), t, g, v0, gamma)
        if np.any(x < x_lo) or np.any(x > x_hi):
            raise NoBracket("x lies outside the image of the label range")
        lo = np.full_like(x, f_lo)
        hi = np.full_like(x, f_hi)
    else:
        pad = bound + 1.0 + np.abs(x)
        lo = x - pad
        hi = x + pad
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        below = position(mid, t, g, v0, gamma) < x
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= np.maximum(tol, 2 * np.spacing(np.maximum(np.abs(lo), np.abs(hi))))):
            break
    f = 0.5 * (lo + hi)
    return float(f[0]) if scalar else f


def slab_state(rho0, v0, gamma, t, x_grid, tol=0.0, guard=DEFAULT_GUARD):
    """Exact slab fields at time ``t`` on ``x_grid``.

    Density comes from the chain rule rho = rho0(f) / (dx/df); grid points
    that land on a moving edge of the support take the interior value.  The
    edge positions are returned in ``state.edges``.

    Raises
    ------
    CollapseSingularity
        If ``t`` reaches the collapse time or dx/df drops below ``guard``;
        the exception carries the collapse time.
    """
    v0 = _velocity(v0)
    if not np.isfinite(t) or t < 0:
        raise ValueError("time must be finite and nonnegative")
    g = planar_g(rho0)
    t_c = collapse_time(rho0, v0, gamma)
    if t_c is not None and t >= t_c:
        raise CollapseSingularity(f"slab collapses at t = {t_c!r}", time=t_c)
    if min_jacobian(t, rho0, v0, gamma) < guard:
        raise CollapseSingularity(f"dx/df below guard; collapse at t = {t_c!r}", time=t_c)
    x = np.asarray(x_grid, dtype=float)
    f = np.atleast_1d(characteristic_invert(x, t, g, v0, gamma, tol=tol))

    side = np.full(f.shape, "", dtype=object)
    edges = ()
    supp = support(rho0)
    if supp is not None:
        edge_x = position(np.array(supp), t, g, v0, gamma)
        edges = (float(edge_x[0]), float(edge_x[1]))
        for label, ex, inner in ((supp[0], edge_x[0], "right"), (supp[1], edge_x[1], "left")):
            hit = np.abs(x - ex) <= 4 * np.spacing(max(abs(ex), 1.0))
            f = np.where(hit, label, f)
            side = np.where(hit, inner, side)

    rho_f = g.integrand(f)
    jac = jacobian(f, t, rho0, v0, gamma)
    for s in ("left", "right"):
        sel = side == s
        if np.any(sel):
            rho_f = np.where(sel, rho0.limit(f, s), rho_f)
            jac = np.where(sel, jacobian(f, t, rho0, v0, gamma, side=s), jac)
    rho = rho_f / jac
    g_f = g.evaluate(f)
    v = v0.evaluate(f) - 4.0 * math.pi * gamma * t * g_f
    return SlabState(t, x, rho, v, g_f, labels=f, edges=edges)


@dataclass(frozen=True)
class SlabDisplacement:
    """s(., t) as a smooth-function handle for the Lagrange series.

    Taylor coefficients come from the closed-form local piece, so they are
    exact inside a piece of the initial data.
    """

    g: object
    v0: ProfileFunction
    gamma: float
    t: float

    def __post_init__(self):
        object.__setattr__(self, "v0", _velocity(self.v0))

    def __call__(self, f):
        return displacement(f, self.t, self.g, self.v0, self.gamma)

    def taylor(self, x, order):
        k = 2.0 * math.pi * self.gamma * self.t * self.t
        return -self.t * self.v0.taylor(x, order) + k * self.g.taylor(x, order)
