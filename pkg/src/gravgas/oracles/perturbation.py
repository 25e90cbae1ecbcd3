"""Linear density perturbations of a uniform background.

Two contrasting modes are integrated as ODEs in time:

* gravitating gas, spatially uniform: rho'' = 4 pi gamma rho0 (rho0 + rho),
  which grows like exp(sigma t) with sigma = sqrt(4 pi gamma rho0);
* ordinary gas, one Fourier mode of the wave equation with sound speed c and
  wavenumber q: rho'' + c^2 q^2 rho = 0, a bounded oscillation.

The growth exponent is read off by log-linear regression over the second
half of the run, so it is measured rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

GRAVITATING = "gravitating"
SOUND = "sound"


@dataclass(frozen=True, eq=False)
class PerturbationRun:
    mode: str
    rho0: float
    gamma: float
    amplitude0: float
    rate0: float
    t: np.ndarray
    rho: np.ndarray
    rate: np.ndarray
    exponent: float

    @property
    def sigma(self):
        """Growth rate predicted for the gravitating mode."""
        return math.sqrt(4.0 * math.pi * self.gamma * self.rho0)


def _fit_slope(t, y):
    slope, _ = np.polyfit(t, np.log(y), 1)
    return float(slope)


def _peak_envelope(t, y, period):
    """Largest |y| within each whole period of the window."""
    edges = np.arange(t[0], t[-1] + 0.5 * period, period)
    tc, peaks = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (t >= lo) & (t < hi)
        if np.any(sel):
            tc.append(0.5 * (lo + hi))
            peaks.append(np.max(np.abs(y[sel])))
    return np.array(tc), np.array(peaks)


def perturbation_growth(rho0, gamma, mode=GRAVITATING, t_end=None, amplitude=None, rate=0.0,
                        sound_speed=1.0, wavenumber=1.0, n_samples=4001, rtol=1e-12, atol=1e-14):
    """Integrate a perturbation mode and fit its exponential growth rate.

    Parameters
    ----------
    mode : {"gravitating", "sound"}
    t_end : float, optional
        Default 20 e-folding times 1/sigma for the gravitating mode and 20
        oscillation periods for the sound mode.
    amplitude : float, optional
        Initial perturbation, default ``1e-3 * rho0``.  Zero is allowed; in the
        gravitating mode the background term still drives growth.
    sound_speed, wavenumber : float
        Sound speed c and wavenumber q for the sound mode.

    Returns
    -------
    PerturbationRun
        ``exponent`` is the slope of log|rho| (gravitating) or of the log of
        the per-period peak amplitude (sound) over the second half.
    """
    if rho0 <= 0 or gamma <= 0:
        raise ValueError("rho0 and gamma must be positive")
    amp = 1e-3 * rho0 if amplitude is None else float(amplitude)
    sigma2 = 4.0 * math.pi * gamma * rho0

    if mode == GRAVITATING:
        if t_end is None:
            t_end = 20.0 / math.sqrt(sigma2)

        def rhs(t, y):
            return [y[1], sigma2 * (rho0 + y[0])]

        period = None
    elif mode == SOUND:
        omega = abs(sound_speed * wavenumber)
        if omega == 0:
            raise ValueError("sound mode needs nonzero sound speed and wavenumber")
        period = 2.0 * math.pi / omega
        if t_end is None:
            t_end = 20.0 * period

        def rhs(t, y):
            return [y[1], -omega * omega * y[0]]

    else:
        raise ValueError(f"unknown perturbation mode {mode!r}")

    t = np.linspace(0.0, t_end, n_samples)
    sol = solve_ivp(rhs, (0.0, t_end), [amp, float(rate)], method="DOP853", t_eval=t,
                    rtol=rtol, atol=atol)
    rho, drho = sol.y
    late = t >= 0.5 * t_end
    if mode == GRAVITATING:
        exponent = _fit_slope(t[late], np.abs(rho[late]))
    else:
        tc, peaks = _peak_envelope(t[late], rho[late], period)
        exponent = _fit_slope(tc, peaks) if np.all(peaks > 0) else 0.0
    return PerturbationRun(mode, float(rho0), float(gamma), amp, float(rate), t, rho, drho, exponent)
