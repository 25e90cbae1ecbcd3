"""Collapse of a uniform cold sphere, closed form against the shell oracle.

The density stays uniform and blows up at t_c = T/2; every shell of the
oracle reaches the centre at the same moment.
"""

import math

import numpy as np

from gravgas import homogeneous_state
from gravgas.oracles import ShellSystem, shell_integrate
from gravgas.profiles import ProfileFunction, cumulative_mass
from gravgas.spherical import homogeneous_period

rho0, gamma = 3.0 / (8.0 * math.pi), 1.0
T = homogeneous_period(rho0, gamma)
print(f"period T = {T:.12f}, collapse at T/2 = {T / 2:.12f} (pi/2 = {math.pi / 2:.12f})")

labels = np.linspace(1.0 / 64, 1.0, 64)
system = ShellSystem.from_profile(cumulative_mass(ProfileFunction.constant(rho0)), gamma, labels)
traj = shell_integrate(system, T)

print(f"{'t / t_c':>8} {'rho / rho0':>14} {'outer r':>12} {'oracle r':>12} {'max rel dev':>12}")
for frac in (0.0, 0.25, 0.5, 0.75, 0.9, 0.99):
    t = frac * T / 2
    exact = homogeneous_state(rho0, gamma, t, labels)
    scale = exact.coord[0] / exact.labels[0]
    r, _ = traj.state(t)
    dev = np.max(np.abs(r - labels * scale) / (labels * scale))
    print(f"{frac:8.2f} {exact.density[0] / rho0:14.6f} {scale:12.8f} {r[-1]:12.8f} {dev:12.2e}")

ct = traj.collapse_times
print(f"oracle collapse times: {ct.min():.9f} .. {ct.max():.9f}")
