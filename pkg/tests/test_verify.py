import math

import numpy as np
import pytest

from a3quartic import calibration, density, surface, torsor, verify


@pytest.mark.parametrize("B", [20, 50, 200])
def test_brute_force_totals(B):
    # alpha1 = 0 solutions of the rewritten conditions are exactly the conic points
    assert verify.lemma_inter_total(B, original=True) == torsor.count(B)
    assert (verify.lemma_inter_total(B, original=False)
            == torsor.count(B) + surface.count_conic(B) // 2)


def _u2(T, B):
    e1, e2, e3, e4, e5, e6, e7 = T.eta
    hb = torsor.HeightBounds.of(T.eta[:5], B)
    P = e1**2 * e2 * e4**2 * e7
    return T.alpha2 * e7 * hb.Y6 / (hb.Y7 * P), e7 / hb.Y7, e6 / hb.Y6


def test_h_le_1_is_the_height_conditions():
    """With u2 = alpha2 eta7 Y6 / (Y7 P) the four terms of h are x0/B .. x4/B."""
    B = 150
    seen = {True: 0, False: 0}
    for T in torsor.iter_points(600):
        u2, t7, t6 = _u2(T, B)
        x = torsor.to_point(T)
        d = t7 - t6 * u2
        assert t7 * abs(d) == pytest.approx(abs(x.x3) / B, rel=1e-12)
        assert abs(d) * abs(t6 + t7 * u2) == pytest.approx(abs(x.x4) / B, rel=1e-9, abs=1e-12)
        inside = surface.height(x) <= B
        if abs(density.h(u2, t7, t6) - 1) > 1e-9:
            assert (density.h(u2, t7, t6) <= 1) == inside
        else:  # a tie in floating point: the height is exactly B
            assert surface.height(x) == B
        seen[inside] += 1
    assert seen[True] == torsor.count(B) and seen[False] > 0


def test_lemma_inter_single_instance():
    r = verify.check_lemma_inter((1,) * 7, 10**4)
    assert r.observed == verify.lemma_inter_count((1,) * 7, 10**4)
    assert r.residual == r.observed - r.main
    assert r.normalized < calibration.GATES["lemma_inter"].bound


def test_lemma_inter_preconditions():
    with pytest.raises(ValueError, match="gcd5"):
        verify.check_lemma_inter((2, 1, 1, 1, 1, 2, 1), 10**4)
    with pytest.raises(ValueError, match="condition1"):
        verify.check_lemma_inter((1, 1, 10, 1, 1, 1, 1), 100)
    with pytest.raises(ValueError):
        verify.check_sum_eta6((10, 10, 10, 10, 10), 100)


def test_parity_classes():
    assert {verify.parity_class(e) for e in verify.PARITY_ETAS.values()} == set(verify.PARITY_ETAS)
    # both parities failing would need 2 | eta1 and 2 | eta3, which gcd6 forbids
    for eta in np.ndindex(*(8,) * 5):
        eta = tuple(int(e) + 1 for e in eta)
        if verify.parity_class(eta) == ("notN", "notM"):
            assert math.gcd(eta[0] * eta[3], eta[2] * eta[4]) != 1


def test_parity_mass_vanishes_on_odd_index():
    r = verify.check_sum_eta7((2, 1, 1, 1, 1), 1, 10**4)
    assert not r.meta["odd_eta7_contribute"]
    r = verify.check_sum_eta7((1, 1, 1, 1, 1), 1, 10**4)
    assert r.meta["odd_eta7_contribute"]


def test_sum_eta7_residual_decays():
    res = [verify.check_sum_eta7((1,) * 5, 1, B).normalized for B in (10**4, 10**5, 10**6)]
    assert res[0] > res[1] > res[2]


def test_suites_are_disjoint_and_reproducible():
    for suite in (verify.inter_suite, verify.sum7_suite, verify.sum6_suite):
        cal, val = suite("calibration"), suite("validation")
        assert not set(map(repr, cal)) & set(map(repr, val))
        assert suite("validation") == val


def test_lemma12_helpers():
    assert list(verify.lemma12_variants(2, 3)) == [(False, False), (True, False),
                                                   (False, True), (True, True)]
    assert list(verify.lemma12_variants(3, 2)) == [(False, False), (True, False)]
    assert verify.lemma12_max(range(1, 4), (100,)) < calibration.GATES["lemma12"].bound


def test_fit_rejects_bad_ladders():
    with pytest.raises(ValueError):
        verify.fit_asymptotic([100, 10], c_peyre=1.0)
    with pytest.raises(ValueError):
        verify.fit_asymptotic([1], c_peyre=1.0)


def test_fit_small_ladder():
    lad = verify.fit_asymptotic([100, 1000], c_peyre=3.28e-5)
    assert lad.consistent
    assert lad.rows[1].n_torsor == 2 * torsor.count(1000)
    assert lad.rows[0].c_fit == pytest.approx(lad.rows[0].n_torsor / (100 * math.log(100) ** 5))


def test_gates_follow_the_margin_rule():
    for g in calibration.GATES.values():
        raw = calibration.MARGIN * g.calibration_max
        assert raw <= g.bound < raw * 1.1
