import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from gravgas.errors import NegativeDensity, NonIntegrable
from gravgas.profiles import (
    CLAMP,
    CONSTANT,
    LINEAR,
    ZERO,
    ProfileFunction,
    cumulative_mass,
    derivative,
    evaluate,
    mean_interior_density,
    planar_g,
    support,
)


def test_linear_midpoint():
    p = ProfileFunction([0.0, 1.0], [1.0, 3.0])
    assert evaluate(p, 0.5) == 2.0
    assert evaluate(ProfileFunction([0.0, 2.0], [0.0, 4.0]), 1.5) == 3.0


def test_zero_outside_support():
    p = ProfileFunction.top_hat(1.0, 1.0)
    assert p(2.0) == 0.0
    assert p(-3.0) == 0.0
    assert p(0.3) == 1.0


def test_clamp_extrapolation():
    p = ProfileFunction([0.0, 1.0], [1.0, 3.0], LINEAR, CLAMP)
    assert p(-1.0) == 1.0
    assert p(5.0) == 3.0


def test_exact_at_knots():
    knots = np.array([0.0, 0.1, 0.7, 1.3, 2.0])
    values = np.array([0.3, 1.1, 0.2, 5.0, 0.0])
    for kind in (LINEAR, CONSTANT):
        p = ProfileFunction(knots, values, kind)
        np.testing.assert_array_equal(p(knots), values)


def test_piecewise_constant_holds_left_value():
    p = ProfileFunction([0.0, 1.0, 2.0], [1.0, 2.0, 3.0], CONSTANT)
    assert p(0.999) == 1.0
    assert p(1.5) == 2.0


@pytest.mark.parametrize("knots,values", [
    ([0.0], [1.0]),
    ([0.0, 0.0], [1.0, 1.0]),
    ([1.0, 0.0], [1.0, 1.0]),
    ([0.0, 1.0], [1.0]),
    ([0.0, 1.0], [np.nan, 1.0]),
])
def test_invalid_profiles_rejected(knots, values):
    with pytest.raises(ValueError):
        ProfileFunction(knots, values)


def test_profile_arrays_are_read_only():
    p = ProfileFunction([0.0, 1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        p.values[0] = 5.0


def test_mass_of_constant_density():
    rho0 = 0.37
    m = cumulative_mass(ProfileFunction.constant(rho0))
    r = np.linspace(0.0, 3.0, 31)
    np.testing.assert_allclose(m(r), rho0 * r**3 / 3.0, rtol=1e-14, atol=1e-16)


def test_mass_of_zero_density():
    m = cumulative_mass(ProfileFunction.constant(0.0))
    assert np.all(m(np.linspace(0, 5, 11)) == 0.0)


def test_mass_of_truncated_sphere():
    m = cumulative_mass(ProfileFunction([0.0, 1.0], [1.0, 1.0], CONSTANT, ZERO))
    assert m(2.0) == pytest.approx(1.0 / 3.0, rel=1e-15)


def test_mass_matches_quadrature():
    rho = ProfileFunction([0.0, 0.4, 1.0, 1.7], [2.0, 1.5, 0.3, 0.0])
    m = cumulative_mass(rho)
    for r in (0.2, 0.4, 0.9, 1.5, 2.5):
        ref, _ = quad(lambda s: s * s * rho(s), 0.0, r, points=[0.4, 1.0, 1.7], epsabs=1e-15)
        assert m(r) == pytest.approx(ref, rel=1e-12)


def test_negative_density_rejected():
    bad = ProfileFunction([0.0, 1.0], [1.0, -0.1])
    with pytest.raises(NegativeDensity):
        cumulative_mass(bad)
    with pytest.raises(NegativeDensity):
        planar_g(ProfileFunction([-1.0, 1.0], [-1.0, 1.0], LINEAR, ZERO))


def test_planar_g_of_uniform_slab():
    g = planar_g(ProfileFunction.top_hat(1.0, 1.0))
    x = np.linspace(-1.0, 1.0, 21)
    np.testing.assert_allclose(g(x), x, atol=1e-15)
    assert g(5.0) == 1.0
    assert g(-5.0) == -1.0
    assert g(0.0) == 0.0


def test_planar_g_zero_density():
    g = planar_g(ProfileFunction.zero())
    assert np.all(g(np.linspace(-3, 3, 7)) == 0.0)


def test_planar_g_requires_finite_mass():
    with pytest.raises(NonIntegrable):
        planar_g(ProfileFunction.constant(1.0))


def test_planar_g_limits_are_half_mass():
    rho = ProfileFunction([-1.0, 0.0, 0.5, 2.0], [0.0, 3.0, 1.0, 0.0], LINEAR, ZERO)
    g = planar_g(rho)
    total, _ = quad(rho, -1.0, 2.0, points=[0.0, 0.5])
    assert g(-10.0) == pytest.approx(-total / 2, rel=1e-13)
    assert g(10.0) == pytest.approx(total / 2, rel=1e-13)
    assert g.total == pytest.approx(total, rel=1e-13)


def test_derivative_conventions():
    m = cumulative_mass(ProfileFunction.constant(0.25))
    assert derivative(m, 1.0) / 1.0**2 == pytest.approx(0.25)
    g = planar_g(ProfileFunction.top_hat(1.0, 1.0))
    # right-hand at the left edge, left-hand at the last knot
    assert derivative(g, -1.0) == 1.0
    assert derivative(g, 1.0) == 1.0
    assert derivative(g, 0.0) == 1.0
    assert derivative(g, 1.5) == 0.0
    p = ProfileFunction([0.0, 1.0, 2.0], [0.0, 1.0, 5.0])
    assert derivative(p, 1.0) == 4.0
    assert derivative(p, 2.0) == 4.0
    assert derivative(ProfileFunction([0.0, 1.0], [1.0, 2.0], LINEAR, ZERO), 3.0) == 0.0


def test_finite_difference_of_g():
    g = planar_g(ProfileFunction.top_hat(1.0, 1.0))
    h = 1e-6
    assert (g(h) - g(-h)) / (2 * h) == pytest.approx(1.0, rel=1e-9)


def test_mean_interior_density():
    m = cumulative_mass(ProfileFunction.constant(0.6))
    np.testing.assert_allclose(mean_interior_density(m, np.array([0.5, 1.0, 2.0])), 0.6, rtol=1e-14)


def test_support():
    assert support(ProfileFunction.top_hat(2.0, 0.5, center=1.0)) == (0.5, 1.5)
    assert support(ProfileFunction.constant(1.0)) is None
    assert support(ProfileFunction.zero()) is None
    p = ProfileFunction([-2.0, -1.0, 1.0, 2.0], [0.0, 1.0, 1.0, 0.0], LINEAR, ZERO)
    assert support(p) == (-2.0, 2.0)


def test_inverse_of_g():
    g = planar_g(ProfileFunction.top_hat(1.0, 1.0))
    assert g.inverse(0.25) == pytest.approx(0.25, abs=1e-15)


positive = st.floats(0.0, 10.0, allow_nan=False)


@st.composite
def densities(draw, min_knots=2, max_knots=8):
    n = draw(st.integers(min_knots, max_knots))
    gaps = draw(st.lists(st.floats(0.05, 2.0), min_size=n - 1, max_size=n - 1))
    knots = np.concatenate([[0.0], np.cumsum(gaps)])
    values = np.array(draw(st.lists(positive, min_size=n, max_size=n)))
    kind = draw(st.sampled_from([LINEAR, CONSTANT]))
    return ProfileFunction(knots, values, kind)


@given(densities())
def test_mass_round_trip_reproduces_density(rho):
    m = cumulative_mass(rho)
    inner = 0.5 * (rho.knots[:-1] + rho.knots[1:])
    got = m.integrand(inner) / inner**2
    np.testing.assert_allclose(got, rho(inner), rtol=1e-12, atol=1e-14)


@given(densities())
def test_mass_nondecreasing_from_zero(rho):
    m = cumulative_mass(rho)
    r = np.linspace(0.0, 1.2 * rho.knots[-1], 200)
    vals = m(r)
    assert vals[0] == 0.0
    assert np.all(np.diff(vals) >= -1e-12 * max(1.0, vals[-1]))


@given(densities(), densities())
def test_mass_additive(a, b):
    knots = np.union1d(a.knots, b.knots)
    knots = np.union1d(knots, np.linspace(0.0, knots[-1], 50))
    # both linear pieces are exact on the union only for linear interpolation of linear pieces
    if a.kind != LINEAR or b.kind != LINEAR:
        return
    total = ProfileFunction(knots, a(knots) + b(knots), LINEAR)
    if not (np.allclose(total(np.linspace(0, knots[-1], 400)),
                        a(np.linspace(0, knots[-1], 400)) + b(np.linspace(0, knots[-1], 400)))):
        return
    r = np.linspace(0.0, knots[-1], 37)
    lhs = cumulative_mass(total)(r)
    rhs = cumulative_mass(a)(r) + cumulative_mass(b)(r)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-11, atol=1e-12)


@st.composite
def slab_densities(draw):
    n = draw(st.integers(2, 8))
    gaps = draw(st.lists(st.floats(0.05, 2.0), min_size=n - 1, max_size=n - 1))
    knots = np.concatenate([[0.0], np.cumsum(gaps)]) - draw(st.floats(0.0, 3.0))
    values = np.array(draw(st.lists(positive, min_size=n, max_size=n)))
    return ProfileFunction(knots, values, draw(st.sampled_from([LINEAR, CONSTANT])), ZERO)


@given(slab_densities())
def test_planar_g_monotone(rho):
    g = planar_g(rho)
    x = np.linspace(rho.knots[0] - 1, rho.knots[-1] + 1, 300)
    assert np.all(np.diff(g(x)) >= -1e-12)


@given(st.lists(st.floats(0.05, 1.0), min_size=1, max_size=5), st.lists(positive, min_size=6, max_size=6))
def test_planar_g_odd_for_even_density(gaps, vals):
    half = np.concatenate([[0.0], np.cumsum(gaps)])
    knots = np.concatenate([-half[:0:-1], half])
    v = np.array(vals[: half.size])
    values = np.concatenate([v[:0:-1], v])
    g = planar_g(ProfileFunction(knots, values, LINEAR, ZERO))
    x = np.linspace(0.0, half[-1] + 0.5, 41)
    np.testing.assert_allclose(g(x), -g(-x), rtol=0, atol=1e-14 * max(g.total, 1e-300))
    assert abs(g(0.0)) <= 1e-15 * max(g.total, 1e-300)
