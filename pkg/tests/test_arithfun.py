"""Exact identities between the arithmetic functions."""
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from a3quartic import arithfun as af

pos = st.integers(1, 60)


def test_phi_values():
    assert af.phi_star(12) == Fraction(1, 3)
    assert af.phi_circ(12) == Fraction(1, 2)
    assert af.phi_dag(6) == Fraction(3, 4) * Fraction(8, 9)
    assert af.phi_flat(15) == Fraction(4, 3) * Fraction(16, 15)
    for n in (1, 2, 9, 30, 97):
        assert af.phi_star(n) == Fraction(sum(math.gcd(k, n) == 1 for k in range(1, n + 1)), n)


def test_phi_rejects_nonpositive():
    for f in (af.phi_star, af.phi_circ, af.phi_dag, af.phi_flat):
        with pytest.raises(ValueError):
            f(0)


def test_circ_flat_parity_up_to_1e4():
    for n in range(1, 10**4 + 1):
        lhs = af.phi_circ(n) * af.phi_flat(n)
        assert lhs == (1 if n % 2 else 2) * af.phi_star(n), n


def test_mobius_inversion_closed_forms():
    for a, b in itertools.product(range(1, 61, 7), range(1, 61, 5)):
        for n in range(1, 61):
            assert af.convolve_mu(lambda m: af.psi(a, b, m), n) == af.psi_mu_closed(a, b, n)
            assert (af.convolve_mu(lambda m: af.psi_prime(a, b, m), n)
                    == af.psi_prime_mu_closed(a, b, n))


@settings(max_examples=200, deadline=None)
@given(pos, pos, pos)
def test_mobius_inversion_property(a, b, n):
    assert af.convolve_mu(lambda m: af.psi(a, b, m), n) == af.psi_mu_closed(a, b, n)
    assert af.convolve_mu(lambda m: af.psi_prime(a, b, m), n) == af.psi_prime_mu_closed(a, b, n)


def test_psi_mu_vanishes_at_even_d_for_odd_b():
    for a in range(1, 61):
        for b in range(1, 61, 2):
            for d in range(2, 61, 2):
                assert af.convolve_mu(lambda m: af.psi(a, b, m), d) == 0


def test_psi_mu_small_value():
    # psi_{3,2}(3) = 1/phi_circ(3) = 2 and psi_{3,2}(1) = 1
    assert af.psi(3, 2, 3) == 2
    assert af.convolve_mu(lambda m: af.psi(3, 2, m), 3) == 1
    assert af.psi_mu_closed(3, 2, 3) == 1


def test_mean_values():
    # partial sums over X grow like Psi X
    for a, b in ((1, 1), (3, 2), (6, 5), (12, 35)):
        X = 10**4
        assert abs(float(af.sum_psi(a, b, X)) / X - float(af.Psi(a, b))) < 5e-3
        assert abs(float(af.sum_psi_prime(a, b, X)) / X - float(af.Psi_prime(a, b))) < 5e-3


def test_psi_values_match_exact():
    n = np.arange(1, 200)
    for a, b in ((4, 3), (15, 2)):
        for prime in (False, True):
            f = af.psi_prime if prime else af.psi
            exact = [float(f(a, b, int(k))) for k in n]
            assert np.allclose(af.psi_values(a, b, n, prime=prime), exact, rtol=0, atol=1e-15)


def test_weighted_sums_report():
    r = af.weighted_sum_check(4, 3, af.RECIPROCAL, (1, 1000))
    assert math.isfinite(r.normalized)


def test_aggregation_identity_full_grid():
    for a, b, c in itertools.product(range(1, 41), repeat=3):
        assert af.aggregation_sum(a, b, c) == af.aggregation_closed(a, b, c)


def test_parity_identities():
    for x, y, z in itertools.product(range(1, 61), repeat=3):
        if (x + 2 * y + 3 * z) % 5 == 0:
            assert af.parity_identity_N(x, y, z)
            assert af.parity_identity_M(x, y, z)


# ---------------------------------------------------------------------------
# theta

SQUAREFREE_12 = [n for n in range(1, 13) if af.mobius(n) != 0]


def _gcd4_7(e):
    e1, e2, e3, e4, e5, e6, e7 = e
    g = math.gcd
    return (g(e7, e2 * e3 * e4 * e5 * e6) == 1 and g(e6, e1 * e2 * e4 * e5) == 1
            and g(e1 * e4, e3 * e5) == 1 and g(e2, e4 * e5) == 1)


def radical(n):
    return math.prod(af.prime_divisors(n))


def test_theta_sees_only_radicals():
    rng = np.random.default_rng(7)
    for _ in range(300):
        e = tuple(int(v) for v in rng.integers(1, 200, 7))
        if _gcd4_7(e):
            assert af.theta(e) == af.theta(tuple(radical(v) for v in e))
            assert af.theta_bruteforce(e) == af.theta_bruteforce(tuple(radical(v) for v in e))


def test_theta_closed_form_exhaustive():
    """Every eta' with entries <= 12 reduces to one of these radical tuples."""
    checked = 0
    for e in itertools.product(SQUAREFREE_12, repeat=7):
        if _gcd4_7(e):
            assert af.theta(e) == af.theta_bruteforce(e), e
            checked += 1
    assert checked == 56872


def test_theta_factorizations():
    for eta in itertools.product((1, 2, 3, 5, 6, 10), repeat=5):
        if not af.coprime_gcd67(eta):
            assert af.Theta(eta) == 0
            continue
        assert af.Theta(eta) == af.Theta_factored(eta)
        for e6 in (1, 3, 5, 7):
            if math.gcd(e6, eta[0] * eta[1] * eta[3] * eta[4]) == 1:
                assert (af.theta_eta6_factored(eta, e6)
                        == af.theta1_prime(eta) * af.theta2_prime(eta, e6))


def test_theta_local_sum():
    for p in (2, 3, 5, 7, 11):
        lhs = (1 - Fraction(1, p)) ** 5 * af.theta_local_sum(p)
        rhs = (1 - Fraction(1, p)) ** 6 * (1 + Fraction(6, p) + Fraction(1, p * p)) / (
            1 - Fraction(1, p * p))
        assert lhs == rhs
    with pytest.raises(ValueError):
        af.theta_local_sum(4)
