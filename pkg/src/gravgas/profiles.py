"""One-dimensional initial-data profiles and their cumulative integrals.

A :class:`ProfileFunction` is a sampled function with a piecewise-linear or
piecewise-constant interpolant.  :func:`cumulative_mass` and :func:`planar_g`
integrate the interpolant in closed form, so the enclosed mass m(r) and the
planar field g(x) carry no quadrature error.

Conventions
-----------
* Piecewise-constant pieces hold ``values[i]`` on ``[knots[i], knots[i+1])``;
  the last knot keeps its own value.
* Derivatives are right-hand derivatives, except at the last knot where the
  left-hand derivative is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from gravgas.errors import NegativeDensity, NonIntegrable

LINEAR = "piecewise-linear"
CONSTANT = "piecewise-constant"
CLAMP = "clamp"
ZERO = "zero-outside"

SPHERICAL_MASS = "spherical-mass"
PLANAR_G = "planar-g"

_KINDS = (LINEAR, CONSTANT)
_EXTRAPOLATIONS = (CLAMP, ZERO)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ProfileFunction:
    """Sampled 1-D function with an explicit interpolation rule.

    Parameters
    ----------
    knots : array_like
        Strictly increasing abscissae, at least two.
    values : array_like
        Ordinates at the knots.
    kind : {"piecewise-linear", "piecewise-constant"}
    extrapolation : {"clamp", "zero-outside"}
        Value outside ``[knots[0], knots[-1]]``: the edge value or zero.
    """

    knots: np.ndarray
    values: np.ndarray
    kind: str = LINEAR
    extrapolation: str = CLAMP

    def __post_init__(self):
        knots = _frozen(self.knots)
        values = _frozen(self.values)
        if knots.ndim != 1 or knots.size < 2:
            raise ValueError("profile needs at least two knots")
        if values.shape != knots.shape:
            raise ValueError("knots and values must have the same length")
        if not (np.all(np.isfinite(knots)) and np.all(np.isfinite(values))):
            raise ValueError("knots and values must be finite")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if self.kind not in _KINDS:
            raise ValueError(f"unknown interpolation kind {self.kind!r}")
        if self.extrapolation not in _EXTRAPOLATIONS:
            raise ValueError(f"unknown extrapolation {self.extrapolation!r}")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, value, lo=0.0, hi=1.0):
        """Constant everywhere (clamped)."""
        return cls([lo, hi], [value, value], CONSTANT, CLAMP)

    @classmethod
    def zero(cls):
        return cls([-1.0, 1.0], [0.0, 0.0], CONSTANT, ZERO)

    @classmethod
    def top_hat(cls, height, half_width, center=0.0):
        """``height`` on ``[center - half_width, center + half_width]``, zero outside."""
        return cls([center - half_width, center + half_width], [height, height], CONSTANT, ZERO)

    @classmethod
    def linear(cls, slope, lo=-1.0, hi=1.0, intercept=0.0):
        """``intercept + slope * x`` on ``[lo, hi]``, clamped outside."""
        return cls([lo, hi], [intercept + slope * lo, intercept + slope * hi], LINEAR, CLAMP)

    # -- edge helpers -----------------------------------------------------

    @property
    def left_value(self):
        return 0.0 if self.extrapolation == ZERO else float(self.values[0])

    @property
    def right_value(self):
        return 0.0 if self.extrapolation == ZERO else float(self.values[-1])

    @property
    def is_density(self):
        return bool(np.all(self.values >= 0.0))

    def _slopes(self):
        if self.kind == CONSTANT:
            return np.zeros(self.knots.size - 1)
        return np.diff(self.values) / np.diff(self.knots)

    def piece_index(self, x):
        """Index of the piece used for right-hand evaluation at ``x``.

        -1 is the left extrapolation region and ``n - 1`` the right one; the
        last knot belongs to piece ``n - 2``.
        """
        x = np.asarray(x, dtype=float)
        n = self.knots.size
        idx = np.searchsorted(self.knots, x, side="right") - 1
        return np.where(x == self.knots[-1], n - 2, idx)

    def _piece_index_left(self, x):
        x = np.asarray(x, dtype=float)
        return np.searchsorted(self.knots, x, side="left") - 1

    def _piece_value(self, idx, x):
        n = self.knots.size
        inner = np.clip(idx, 0, n - 2)
        local = self.values[inner] + self._slopes()[inner] * (x - self.knots[inner])
        return np.where(idx < 0, self.left_value, np.where(idx > n - 2, self.right_value, local))

    # -- evaluation -------------------------------------------------------

    def evaluate(self, x):
        """Interpolated value; exact at knots."""
        x = np.asarray(x, dtype=float)
        out = self._piece_value(self.piece_index(x), x)
        out = np.where(x == self.knots[-1], self.values[-1], out)
        return out[()] if out.ndim == 0 else out

    __call__ = evaluate

    def limit(self, x, side="right"):
        """One-sided limit of the interpolant at ``x``."""
        x = np.asarray(x, dtype=float)
        if side == "right":
            idx = np.searchsorted(self.knots, x, side="right") - 1
        elif side == "left":
            idx = self._piece_index_left(x)
        else:
            raise ValueError("side must be 'left' or 'right'")
        out = self._piece_value(idx, x)
        return out[()] if out.ndim == 0 else out

    def slope(self, x, side=None):
        """Derivative of the interpolant.

        Right-hand by default and left-hand at the last knot; ``side`` forces
        one or the other.
        """
        x = np.asarray(x, dtype=float)
        n = self.knots.size
        if side is None:
            idx = self.piece_index(x)
        elif side == "right":
            idx = np.searchsorted(self.knots, x, side="right") - 1
        elif side == "left":
            idx = self._piece_index_left(x)
        else:
            raise ValueError("side must be 'left' or 'right'")
        inner = np.clip(idx, 0, n - 2)
        out = np.where((idx < 0) | (idx > n - 2), 0.0, self._slopes()[inner])
        return out[()] if out.ndim == 0 else out

    def piece_polynomial(self, i):
        """Polynomial in absolute x representing piece ``i`` (extrapolation pieces allowed)."""
        n = self.knots.size
        if i < 0:
            return Polynomial([self.left_value])
        if i > n - 2:
            return Polynomial([self.right_value])
        s = self._slopes()[i]
        return Polynomial([self.values[i] - s * self.knots[i], s])

    def taylor(self, x, order):
        """Taylor coefficients ``c_j = p^(j)(x) / j!`` of the local piece, j = 0..order."""
        x = float(x)
        poly = self.piece_polynomial(int(self.piece_index(x)))
        return _taylor_coefficients(poly, x, order, value=float(self.evaluate(x)))


def _taylor_coefficients(poly, x, order, value=None):
    out = np.zeros(order + 1)
    d = poly
    fact = 1.0
    for j in range(order + 1):
        if j > 0:
            d = d.deriv()
            fact *= j
        out[j] = d(x) / fact
    if value is not None:
        out[0] = value
    return out


@dataclass(frozen=True, eq=False)
class CumulativeProfile:
    """Closed-form cumulative integral of a density profile.

    ``role`` selects the integral:

    * ``"spherical-mass"``: m(r) = integral of r'^2 rho(r') from 0 to r;
    * ``"planar-g"``: g(x) = (mass left of x - mass right of x) / 2.
    """

    base: ProfileFunction
    role: str
    left: np.ndarray = field(repr=False)
    right: np.ndarray = field(repr=False, default=None)

    @property
    def knots(self):
        return self.base.knots

    @property
    def values(self):
        """Cumulative values at the base knots."""
        return self.evaluate(self.base.knots)

    @property
    def total(self):
        """Total mass: line mass M for planar-g, m(last knot) for spherical-mass."""
        return float(self.left[-1])

    def _weight(self):
        return Polynomial([0.0, 0.0, 1.0]) if self.role == SPHERICAL_MASS else Polynomial([1.0])

    def _integrand(self, i):
        return self._weight() * self.base.piece_polynomial(i)

    def _partial(self, i, lo, hi):
        """Integral of the piece-i integrand over [lo, hi] (vectorized over lo/hi)."""
        return _piece_integral(self.base, i, lo, hi, self.role == SPHERICAL_MASS)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.empty_like(x)
        knots = self.base.knots
        n = knots.size
        idx = np.searchsorted(knots, x, side="right") - 1
        for i in np.unique(idx):
            sel = idx == i
            xs = x[sel]
            if self.role == SPHERICAL_MASS:
                if i < 0:
                    out[sel] = self._partial(-1, 0.0, np.maximum(xs, 0.0))
                else:
                    out[sel] = self.left[i] + self._partial(i, knots[i], xs)
            else:
                if i < 0:
                    out[sel] = -0.5 * self.right[0]
                elif i >= n - 1:
                    out[sel] = 0.5 * self.left[n - 1]
                else:
                    lpart = self.left[i] + self._partial(i, knots[i], xs)
                    rpart = self.right[i + 1] + self._partial(i, xs, knots[i + 1])
                    out[sel] = 0.5 * (lpart - rpart)
        return out[0] if scalar else out

    __call__ = evaluate

    def integrand(self, x, side=None):
        """The derivative of the cumulative profile.

        Right-hand by default, left-hand at the last knot.
        """
        x = np.asarray(x, dtype=float)
        if side is None:
            rho = np.where(x == self.base.knots[-1], self.base.limit(x, "left"), self.base.limit(x, "right"))
        else:
            rho = self.base.limit(x, side)
        out = x * x * rho if self.role == SPHERICAL_MASS else rho
        return out[()] if np.ndim(out) == 0 else out

    def taylor(self, x, order):
        """Taylor coefficients of the local closed-form piece at ``x``."""
        x = float(x)
        i = int(self.base.piece_index(x))
        c = np.zeros(order + 1)
        c[0] = float(self.evaluate(x))
        if order >= 1:
            c[1:] = _taylor_coefficients(self._integrand(i), x, order - 1) / np.arange(1, order + 1)
        return c

    def inverse(self, y, tol=0.0):
        """Smallest abscissa where the cumulative profile reaches ``y``.

        Bisection inside the bracketing piece, run to machine precision.
        """
        y = np.asarray(y, dtype=float)
        scalar = y.ndim == 0
        y = np.atleast_1d(y)
        knots = self.base.knots
        vals = self.evaluate(knots)
        if np.any(y < vals[0]) or np.any(y > vals[-1]):
            raise ValueError("value outside the range covered by the profile knots")
        i = np.clip(np.searchsorted(vals, y, side="left") - 1, 0, knots.size - 2)
        lo = knots[i].copy()
        hi = knots[i + 1].copy()
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = self.evaluate(mid) < y
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo <= np.maximum(tol, 4 * np.spacing(np.abs(hi)))):
                break
        out = 0.5 * (lo + hi)
        return out[0] if scalar else out


_GAUSS = 1.0 / math.sqrt(3.0)


def _piece_integral(profile, i, lo, hi, spherical):
    """Integral of rho (or r^2 rho) on piece ``i`` over [lo, hi].

    Two-point Gauss-Legendre is exact for the cubic integrand, and rho is
    evaluated in coordinates local to the piece, so steep pieces far from the
    origin do not cancel.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    idx = np.full(np.broadcast(lo, hi).shape, int(i))
    total = 0.0
    for x in (mid - half * _GAUSS, mid + half * _GAUSS):
        f = profile._piece_value(idx, x)
        total = total + (x * x * f if spherical else f)
    return half * total


def _piece_integrals(profile, spherical):
    knots = profile.knots
    return np.array([_piece_integral(profile, i, knots[i], knots[i + 1], spherical)
                     for i in range(knots.size - 1)], dtype=float)


def cumulative_mass(rho0):
    """Enclosed mass m(r) = int_0^r r'^2 rho0(r') dr' (no 4 pi factor).

    Raises
    ------
    NegativeDensity
        If any density value is negative.
    """
    if not rho0.is_density:
        raise NegativeDensity("density profile has negative values")
    if rho0.knots[0] < 0:
        raise ValueError("spherical density must be defined on r >= 0")
    head = float(_piece_integral(rho0, -1, 0.0, rho0.knots[0], True))
    left = head + np.concatenate([[0.0], np.cumsum(_piece_integrals(rho0, True))])
    return CumulativeProfile(rho0, SPHERICAL_MASS, _frozen(left))


def planar_g(rho0):
    """Planar field g(x) = (int_{-inf}^x rho - int_x^inf rho) / 2.

    The mass integrals from the left and from the right are accumulated
    separately, which keeps g of an even density odd to rounding level.

    Raises
    ------
    NegativeDensity
        If any density value is negative.
    NonIntegrable
        If a clamped edge value is nonzero (infinite line mass).
    """
    if not rho0.is_density:
        raise NegativeDensity("density profile has negative values")
    if rho0.left_value != 0.0 or rho0.right_value != 0.0:
        raise NonIntegrable("planar density must vanish outside its knots")
    pieces = _piece_integrals(rho0, False)
    left = np.concatenate([[0.0], np.cumsum(pieces)])
    right = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
    return CumulativeProfile(rho0, PLANAR_G, _frozen(left), _frozen(right))


def evaluate(p, x):
    """Evaluate a profile or cumulative profile at ``x``."""
    return p.evaluate(x)


def derivative(p, x):
    """Derivative of a profile or cumulative profile at ``x``.

    Right-hand at knots, left-hand at the last knot; zero in zero-outside
    extrapolation regions.
    """
    if isinstance(p, CumulativeProfile):
        return p.integrand(x)
    return p.slope(x)


def mean_interior_density(m, r):
    """Mean density 3 m(r) / r^3 inside radius ``r``."""
    r = np.asarray(r, dtype=float)
    return 3.0 * m.evaluate(r) / r**3


def support(p):
    """Interval outside of which a zero-outside profile vanishes, or None."""
    if p.extrapolation != ZERO:
        return None
    v = p.values
    if p.kind == CONSTANT:
        nonzero = v[:-1] != 0.0
    else:
        nonzero = (v[:-1] != 0.0) | (v[1:] != 0.0)
    idx = np.flatnonzero(nonzero)
    if idx.size == 0:
        return None
    return (float(p.knots[idx[0]]), float(p.knots[idx[-1] + 1]))


__all__ = [
    "ProfileFunction",
    "CumulativeProfile",
    "cumulative_mass",
    "planar_g",
    "evaluate",
    "derivative",
    "mean_interior_density",
    "support",
]
