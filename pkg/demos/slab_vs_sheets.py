"""A uniform slab released from rest, against 1000 exact sheets.

The slab shrinks as x = f (1 - t^2 / T^2) and its density rises as
b / (1 - t^2 / T^2) until everything meets at T.
"""

import math

import numpy as np

from gravgas import slab_state
from gravgas.oracles import SheetSystem, sheet_density, sheet_integrate
from gravgas.profiles import ProfileFunction
from gravgas.slab import collapse_time

b, a, gamma = 1.0, 1.0, 1.0 / (2.0 * math.pi)
rho = ProfileFunction.top_hat(b, a)
T = collapse_time(rho, None, gamma)
print(f"collapse time from the closed form: {T!r}")

state = slab_state(rho, None, gamma, 0.5, np.array([0.0, 0.7, 0.8]))
print(f"t = 0.5: density at x = 0, 0.7, 0.8 -> {state.density}, edges {state.edges}")

system = SheetSystem.from_profile(rho, None, gamma, 1000)
times = [0.0, 0.5, 0.8, 0.9, 0.95]
run = sheet_integrate(system, 0.95, output_times=times)
print(f"{'t':>5} {'sheet density':>14} {'exact':>10} {'max |u - v|':>12}")
for t, x, u in zip(run.times, run.positions, run.velocities):
    est = np.nanmean(sheet_density(x, system.masses))
    exact = slab_state(rho, None, gamma, t, x)
    print(f"{t:5.2f} {est:14.8f} {b / (1 - (t / T) ** 2):10.6f} {np.max(np.abs(u - exact.velocity)):12.2e}")

run = sheet_integrate(system, 1.2)
print(f"first sheet event: {run.events[0].kind} at t = {run.events[0].time:.12f}")
