"""Inverting x = f - s(f) by Lagrange series.

For a linear displacement the terms form a geometric series with ratio
equal to the slope, so slopes of 1 or more diverge.  Inside a collapsing
uniform slab the series matches the bisection root to rounding.
"""

import math

import numpy as np

from gravgas.lagrange_series import PolynomialFunction, convergence_estimate, invert_series
from gravgas.profiles import ProfileFunction, planar_g
from gravgas.slab import SlabDisplacement, characteristic_invert

x = 0.45
for slope in (0.1, 0.5, 0.9, 1.0, 1.3):
    res = invert_series(PolynomialFunction([0.0, slope]), x, 30)
    est = convergence_estimate(res)
    exact = x / (1 - slope) if slope != 1 else math.inf
    print(f"slope {slope:3.1f}: value {res.value: .15g} exact {exact: .15g} "
          f"converged {res.converged} ratio {est.ratio:.3f}")

gamma = 1.0 / (2.0 * math.pi)
t = math.sqrt(0.5 / (2 * math.pi * gamma))
g = planar_g(ProfileFunction.top_hat(1.0, 1.0))
handle = SlabDisplacement(g, None, gamma, t)
for order in (5, 10, 20, 40, 60):
    errs = [abs(invert_series(handle, xi, order).value - characteristic_invert(xi, t, g, None, gamma))
            for xi in np.linspace(-0.45, 0.45, 7)]
    print(f"slab interior, order {order:2d}: max error {max(errs):.2e}")
