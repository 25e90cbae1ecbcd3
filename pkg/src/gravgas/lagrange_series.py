"""Truncated Lagrange inversion of x = f - s(f).

The inverse is expanded as

    f = x + sum_{n>=1} (1/n!) d^{n-1}/dx^{n-1} [s(x)^n].

Term n equals (1/n) times the coefficient of h^(n-1) in the Taylor series of
s(x + h)^n, so each term is formed by truncated power-series multiplication
of the Taylor coefficients of s at x.  No factorials of large numbers and no
repeated numerical differentiation are involved.

A smooth-function handle is any object with ``taylor(x, order)`` returning
the coefficients ``s^(j)(x) / j!`` for ``j = 0..order``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from gravgas.errors import DerivativeUnavailable

MAX_ORDER = 64


@dataclass(frozen=True, eq=False)
class SeriesResult:
    value: float
    order: int
    term_magnitudes: np.ndarray
    converged: bool
    terms: np.ndarray
    x: float


@dataclass(frozen=True)
class ConvergenceEstimate:
    ratio: float
    diverging: bool


@dataclass(frozen=True, eq=False)
class PolynomialFunction:
    """s(x) = sum c_k x^k, with exact Taylor coefficients."""

    coefficients: Sequence[float]

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coefficients)

    def taylor(self, x, order):
        p = np.polynomial.Polynomial(self.coefficients)
        out = np.zeros(order + 1)
        fact = 1.0
        for j in range(order + 1):
            if j:
                p = p.deriv()
                fact *= j
            out[j] = p(x) / fact
        return out


@dataclass(frozen=True, eq=False)
class DerivativeFunction:
    """s given by callables for s, s', s'', ...; orders beyond the list are unavailable."""

    derivatives: Sequence[Callable[[float], float]]

    def __call__(self, x):
        return self.derivatives[0](x)

    def taylor(self, x, order):
        if order >= len(self.derivatives):
            raise DerivativeUnavailable(
                f"derivative of order {order} requested, only {len(self.derivatives) - 1} supplied"
            )
        return np.array([self.derivatives[j](x) / math.factorial(j) for j in range(order + 1)])


def _central_weights(k, m):
    """Weights of the (2m+1)-point central stencil for the k-th derivative (unit step)."""
    pts = np.arange(-m, m + 1, dtype=float)
    vander = np.vander(pts, increasing=True).T
    rhs = np.zeros(2 * m + 1)
    rhs[k] = math.factorial(k)
    return np.linalg.solve(vander, rhs)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Derivatives of a black-box callable by central differences with one Richardson step.

    The step for order k is ``step * (1 + k / 2)``, scaled by ``max(1, |x|)``.
    Accuracy drops quickly with order: expect roughly 1e-8 relative at order
    2, 1e-5 at order 4 and little useful precision above order 6.  Orders
    above ``max_order`` raise :class:`DerivativeUnavailable`.
    """

    func: Callable
    step: float = 1e-2
    max_order: int = 8

    def __call__(self, x):
        return self.func(x)

    def _derivative(self, x, k, h):
        m = k // 2 + 1
        w = _central_weights(k, m)
        pts = x + h * np.arange(-m, m + 1)
        vals = np.array([self.func(p) for p in pts], dtype=float)
        return float(w @ vals) / h**k

    def taylor(self, x, order):
        if order > self.max_order:
            raise DerivativeUnavailable(f"sampled derivatives are capped at order {self.max_order}")
        out = np.zeros(order + 1)
        out[0] = self.func(x)
        scale = max(1.0, abs(x))
        for k in range(1, order + 1):
            m = k // 2 + 1
            p = 2 * ((2 * m + 2 - k) // 2)
            h = self.step * (1.0 + k / 2.0) * scale
            coarse = self._derivative(x, k, h)
            fine = self._derivative(x, k, h / 2)
            out[k] = (fine + (fine - coarse) / (2**p - 1)) / math.factorial(k)
        return out


def _mul_truncated(a, b, n):
    return np.convolve(a, b)[:n]


def invert_series(s, x, order, tol=1e-14):
    """Partial sum of the Lagrange inversion series through ``order`` terms.

    ``converged`` is set when the last term is below ``tol`` and not larger
    than the one before (an exactly vanishing tail counts as converged).
    Divergence is never masked: inspect ``converged`` and
    :func:`convergence_estimate`.

    Raises
    ------
    ValueError
        If ``order`` is outside ``1..MAX_ORDER``.
    DerivativeUnavailable
        If ``s`` cannot supply ``order - 1`` derivatives.
    """
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 1..{MAX_ORDER}")
    x = float(x)
    c = np.asarray(s.taylor(x, order - 1), dtype=float)
    power = np.zeros(order)
    power[0] = 1.0
    terms = np.empty(order)
    for n in range(1, order + 1):
        power = _mul_truncated(power, c, order)
        terms[n - 1] = power[n - 1] / n
    mags = np.abs(terms)
    last = mags[-1]
    if order == 1:
        converged = bool(last < tol)
    else:
        converged = bool(last < tol and (last < mags[-2] or last == 0.0))
    value = math.fsum([x, *terms])
    return SeriesResult(value, order, mags, converged, terms, x)


def convergence_estimate(result, window=5):
    """Geometric ratio of the series tail.

    Uses the geometric mean of successive magnitude ratios over the last
    ``window`` nonzero terms; a ratio >= 1 flags divergence.  An exactly
    vanishing tail gives ratio 0.
    """
    if result.order < 3:
        raise ValueError("convergence_estimate needs at least 3 terms")
    mags = result.term_magnitudes
    nz = np.flatnonzero(mags > 0)
    if nz.size == 0 or nz[-1] < result.order - 1:
        return ConvergenceEstimate(0.0, False)
    tail = mags[nz[-1] - min(window, nz.size - 1): nz[-1] + 1]
    if tail.size < 2 or np.any(tail == 0):
        return ConvergenceEstimate(0.0, False)
    ratio = float(np.exp(np.mean(np.diff(np.log(tail)))))
    return ConvergenceEstimate(ratio, ratio >= 1.0)
