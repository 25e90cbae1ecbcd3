import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from gravgas.errors import CollapseSingularity, NegativeRadicand, OutOfRange, ShellCrossing
from gravgas.profiles import CONSTANT, ZERO, ProfileFunction, cumulative_mass
from gravgas.spherical import (
    characteristic,
    cold_collapse_state,
    collapse_time,
    energy_function,
    homogeneous_collapse_time,
    homogeneous_period,
    homogeneous_state,
    kepler_solve,
    label_collapse_time,
    shell_crossing_time,
    velocity_from_energy,
)

RHO0 = 3.0 / (8.0 * math.pi)


def t_at_alpha(alpha, T):
    return -(alpha + math.sin(alpha)) * T / (2.0 * math.pi)


def test_kepler_fixed_points():
    assert kepler_solve(0.0) == 0.0
    assert kepler_solve(-math.pi) == pytest.approx(-math.pi, abs=1e-12)
    assert kepler_solve(-math.pi / 2 - 1.0) == pytest.approx(-math.pi / 2, abs=1e-12)


def test_kepler_matches_brentq():
    ys = np.linspace(-2 * math.pi + 1e-3, 0.0, 97)
    got = kepler_solve(ys)
    ref = [brentq(lambda a, y=y: a + math.sin(a) - y, -2 * math.pi, 0.0, xtol=1e-15) for y in ys]
    np.testing.assert_allclose(got, ref, atol=2e-7)
    assert np.max(np.abs(got + np.sin(got) - ys)) < 1e-13


@pytest.mark.parametrize("y", [0.1, -2 * math.pi, -7.0, math.nan])
def test_kepler_rejects_out_of_range(y):
    with pytest.raises(OutOfRange):
        kepler_solve(y)


@given(st.floats(-2 * math.pi, 0.0, exclude_min=True))
def test_kepler_residual_property(y):
    a = kepler_solve(y)
    assert -2 * math.pi <= a <= 0.0
    assert abs(a + math.sin(a) - y) < 1e-13


def test_homogeneous_period_unit_case():
    assert homogeneous_period(RHO0, 1.0) == pytest.approx(math.pi, rel=1e-15)
    assert homogeneous_collapse_time(RHO0, 1.0) == pytest.approx(math.pi / 2, rel=1e-15)


def test_homogeneous_t0_is_initial_state():
    r = np.linspace(0.1, 1.0, 10)
    s = homogeneous_state(RHO0, 1.0, 0.0, r)
    np.testing.assert_array_equal(s.rho, RHO0)
    np.testing.assert_array_equal(s.v, 0.0)
    np.testing.assert_allclose(s.m, RHO0 * r**3 / 3, rtol=1e-15)


def test_homogeneous_density_at_quarter_phase():
    T = homogeneous_period(RHO0, 1.0)
    t = t_at_alpha(-math.pi / 2, T)
    s = homogeneous_state(RHO0, 1.0, t, np.linspace(0.01, 1.0, 50))
    np.testing.assert_allclose(s.alpha, -math.pi / 2, atol=1e-13)
    np.testing.assert_allclose(s.rho, 8.0 * RHO0, rtol=1e-12)


def test_homogeneous_velocity_is_time_derivative_of_radius():
    # independent check: follow one label and difference its radius in time
    T = homogeneous_period(RHO0, 1.0)
    f = 0.8
    t, h = 0.9, 1e-6

    def radius(tt):
        a = kepler_solve(-2 * math.pi * tt / T, tol=1e-15)
        return f * (1 + math.cos(a)) / 2

    v_fd = (radius(t + h) - radius(t - h)) / (2 * h)
    r = radius(t)
    s = homogeneous_state(RHO0, 1.0, t, np.array([r]))
    assert s.v[0] == pytest.approx(v_fd, rel=1e-8)
    # the single-power denominator gives a different answer
    a = s.alpha[0]
    single = 2 * math.pi * r * math.sin(a) / (T * (1 + math.cos(a)))
    assert abs(single - v_fd) > 0.1 * abs(v_fd)


def test_homogeneous_refuses_collapse():
    with pytest.raises(CollapseSingularity) as info:
        homogeneous_state(RHO0, 1.0, 2.0, np.array([0.5]))
    assert info.value.time == pytest.approx(math.pi / 2)


def test_homogeneous_periodic_returns_after_one_period():
    T = homogeneous_period(RHO0, 1.0)
    r = np.array([0.3, 0.7])
    s = homogeneous_state(RHO0, 1.0, T + 0.2, r, periodic=True)
    s0 = homogeneous_state(RHO0, 1.0, 0.2, r)
    np.testing.assert_allclose(s.rho, s0.rho, rtol=1e-10)


def test_homogeneous_density_keeps_mass():
    T = homogeneous_period(RHO0, 1.0)
    s = homogeneous_state(RHO0, 1.0, 0.4 * T, np.array([0.25]))
    f = s.labels[0]
    assert s.rho[0] * s.r[0] ** 3 == pytest.approx(RHO0 * f**3, rel=1e-13)


def test_cold_collapse_matches_homogeneous():
    m = cumulative_mass(ProfileFunction.constant(RHO0))
    r = np.linspace(0.05, 1.0, 40)
    for t in (0.3, 1.0, 1.4):
        a = cold_collapse_state(m, 1.0, t, r)
        b = homogeneous_state(RHO0, 1.0, t, r)
        np.testing.assert_allclose(a.rho, b.rho, rtol=1e-12)
        np.testing.assert_allclose(a.v, b.v, rtol=1e-11)
        np.testing.assert_allclose(a.m, b.m, rtol=1e-12)


def test_single_label_collapse_time():
    m = cumulative_mass(ProfileFunction.constant(RHO0))
    f = 1.0
    expected = 0.5 * math.pi * math.sqrt(f**3 / (8 * math.pi * m(f)))
    assert label_collapse_time(f, m(f), 1.0) == pytest.approx(expected)
    assert expected == pytest.approx(math.pi / 2)
    assert collapse_time(m, 1.0, np.array([0.5, 1.0])) == pytest.approx(math.pi / 2)


def test_characteristic_energy_is_conserved():
    rho = ProfileFunction([0.0, 1.0, 2.0], [1.0, 0.4, 0.0], CONSTANT, ZERO)
    m = cumulative_mass(rho)
    f = np.array([0.3, 1.0, 1.6, 2.5])
    c = characteristic(m, 1.0, f, 0.3)
    energy = 0.5 * c.v**2 - 4 * math.pi * m(f) / c.r
    np.testing.assert_allclose(energy, energy_function(f, m(f), 0.0, 1.0), rtol=1e-12)


def test_velocity_from_energy_forbidden_region():
    with pytest.raises(NegativeRadicand):
        velocity_from_energy(1.0, 2.0, 1.0, 0.0, 1.0)


def test_cold_collapse_t0():
    rho = ProfileFunction([0.0, 1.0, 2.0], [1.0, 0.4, 0.0], CONSTANT, ZERO)
    r = np.array([0.5, 1.5, 2.5])
    s = cold_collapse_state(cumulative_mass(rho), 1.0, 0.0, r)
    np.testing.assert_allclose(s.rho, rho(r))
    np.testing.assert_array_equal(s.v, 0.0)


def test_cold_collapse_density_matches_mass_derivative():
    # density from the chain rule against a finite difference of m(r, t)
    rho = ProfileFunction([0.0, 0.5, 1.0, 2.0], [0.4, 0.3, 0.2, 0.0])
    m = cumulative_mass(rho)
    t = 0.8
    r = np.linspace(0.1, 1.5, 15)
    h = 1e-6
    s = cold_collapse_state(m, 1.0, t, r)
    up = cold_collapse_state(m, 1.0, t, r + h)
    dn = cold_collapse_state(m, 1.0, t, r - h)
    rho_fd = (up.m - dn.m) / (2 * h) / r**2
    np.testing.assert_allclose(s.rho, rho_fd, rtol=1e-6)


def test_cold_collapse_exterior_vacuum():
    rho = ProfileFunction([0.0, 1.0], [1.0, 1.0], CONSTANT, ZERO)
    m = cumulative_mass(rho)
    s = cold_collapse_state(m, 1.0, 0.3, np.array([1.5, 3.0]))
    np.testing.assert_array_equal(s.rho, 0.0)
    np.testing.assert_allclose(s.m, m.total)


def test_shell_crossing_detected():
    # mean interior density rises outward, so outer shells overtake inner ones
    rho = ProfileFunction([0.0, 0.5, 1.0], [0.01, 0.01, 2.0], "piecewise-linear", ZERO)
    m = cumulative_mass(rho)
    t_col = collapse_time(m, 1.0, np.linspace(0.01, 1.0, 200))
    with pytest.raises(ShellCrossing) as info:
        cold_collapse_state(m, 1.0, 0.99 * t_col, np.linspace(0.01, 1.0, 50))
    assert 0 < info.value.time < t_col


def test_crossing_time_is_monotone_boundary():
    rho = ProfileFunction([0.0, 0.5, 1.0], [0.01, 0.01, 2.0], "piecewise-linear", ZERO)
    m = cumulative_mass(rho)
    labels = np.linspace(0.01, 1.0, 200)
    t_col = collapse_time(m, 1.0, labels)
    t_x = shell_crossing_time(m, 1.0, labels, t_col * 0.999)
    assert t_x < t_col
    cold_collapse_state(m, 1.0, 0.9 * t_x, np.linspace(0.01, 0.9, 30))


def test_cold_collapse_refuses_collapse():
    m = cumulative_mass(ProfileFunction.constant(RHO0))
    with pytest.raises(CollapseSingularity) as info:
        cold_collapse_state(m, 1.0, 1.6, np.linspace(0.1, 1.0, 5))
    assert info.value.time == pytest.approx(math.pi / 2, rel=1e-12)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        homogeneous_state(RHO0, 1.0, -1.0, np.array([1.0]))


def test_dense_output_grid_is_not_a_false_crossing():
    m = cumulative_mass(ProfileFunction([0.0, 0.5, 1.0, 2.0], [0.4, 0.3, 0.2, 0.1]))
    s = cold_collapse_state(m, 1.0, 0.6, np.linspace(0.05, 1.0, 8000))
    assert np.all(np.diff(s.coord) > 0) and np.all(s.density > 0)
