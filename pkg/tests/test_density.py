import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from a3quartic import density

unit = st.floats(1e-3, 1.0, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(unit, unit)
def test_g1_closed_form_matches_sampling(t7, t6):
    assert abs(density.g1(t7, t6) - density.g1_sampled(t7, t6)) < 1e-9


def test_g1_array_equals_scalar():
    rng = np.random.default_rng(11)
    t = rng.random((2, 500)) * 1.2 + 1e-4
    vec = density.g1_array(t[0], t[1])
    assert np.array_equal(vec, [density.g1(a, b) for a, b in t.T])


def test_g1_support_and_domain():
    assert density.g1(1.5, 0.5) == 0.0
    with pytest.raises(ValueError):
        density.g1(0.0, 0.5)


def test_g1_brute_force_slice():
    t7, t6 = 0.4, 0.7
    u = np.linspace(-20, 20, 400_001)
    inside = [density.h(x, t7, t6) <= 1 for x in u]
    assert abs(np.count_nonzero(inside) * (u[1] - u[0]) - density.g1(t7, t6)) < 1e-3


def test_omega_quadrature_against_monte_carlo():
    q = density.omega_infty(1e-8)
    mc = density.omega_infty_mc(2 * 10**6, seed=5)
    assert abs(q.value - mc.value) < 3 * mc.error
    assert q.error < 1e-7


def test_monte_carlo_is_seeded():
    a = density.omega_infty_mc(10**5, seed=1)
    assert a.value == density.omega_infty_mc(10**5, seed=1).value
    assert a.value != density.omega_infty_mc(10**5, seed=2).value


def test_g3_tends_to_full_integral():
    eta = (1, 1, 1, 1, 1)
    full = density.omega_infty(1e-8).value / 4
    gaps = [full - density.g3(eta, B) for B in (1e4, 1e8, 1e16)]
    assert all(g > 0 for g in gaps)
    assert gaps[0] / gaps[1] > 10 and gaps[1] / gaps[2] > 100
    with pytest.raises(ValueError):
        density.g3((10, 10, 10, 10, 10), 100)


def test_cutoffs_are_symmetric():
    # g1(t7, t6) and g1(t6, t7) have the same integral over every square
    a = density.cutoff_measure(Z6=100.0)
    b = density.cutoff_measure(Z7=100.0)
    assert abs(a - b) < 1e-8


def test_g1_tiny_t6_has_no_cancellation():
    # two components of length ~ 2 / t7^2 each, one of them near u = t7 / t6
    t6 = 1e-14
    for t7 in (0.3, 0.5, 0.9):
        assert density.g1(t7, t6) == pytest.approx(4 / t7**2, rel=1e-9)


def test_local_densities():
    assert density.omega_p(3) == Fraction(28, 9)
    for p in (2, 3, 5, 7, 11, 97):
        assert density.local_factor_identity(p)
    with pytest.raises(ValueError):
        density.omega_p(9)


def test_euler_tail_constant_holds():
    for p in [7, 11, 13, 101, 1009]:
        x = 1 / p
        assert abs(6 * math.log1p(-x) + math.log1p(6 * x + x * x)) <= density.TAIL_C * x * x


def test_euler_product_against_exact_partial():
    est = density.euler_product(1000)
    assert math.isclose(est.value, float(density.euler_product_exact(1000)), rel_tol=1e-13)
    full = density.euler_product(10**5)
    assert abs(full.value - est.value) <= est.error


def test_peyre_constant_assemblies():
    br = density.peyre_constant(10**4, 1e-8)
    assert br.assemblies_agree
    assert br.alpha_polytope == 2 * br.alpha_tilde
    assert math.isclose(br.c, 3.2797e-5, rel_tol=1e-3)
    with pytest.raises(ValueError):
        density.peyre_constant(1)
