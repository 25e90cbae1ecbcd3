"""Gravitating gas has no sound waves: density perturbations grow.

A uniform perturbation of a gravitating background grows like
exp(sqrt(4 pi gamma rho0) t); one Fourier mode of ordinary sound just
oscillates.
"""

import math

from gravgas.oracles import perturbation_growth

gamma = 1.0
for rho0 in (1.0 / (4.0 * math.pi), 0.5 / math.pi, 1.0):
    run = perturbation_growth(rho0, gamma)
    print(f"rho0 = {rho0:.5f}: fitted exponent {run.exponent:.6f}, predicted {run.sigma:.6f}")

run = perturbation_growth(1.0, gamma, mode="sound", sound_speed=1.0, wavenumber=2.0)
print(f"sound mode: fitted exponent {run.exponent:.2e}, peak |rho| {abs(run.rho).max():.3e}")
