
import pytest
from hypothesis import given, settings, strategies as st

from a3quartic import surface, torsor
from a3quartic.torsor import InvariantError, TorsorPoint

POINTS_200 = None


def points(B=200):
    global POINTS_200
    if POINTS_200 is None:
        POINTS_200 = list(torsor.iter_points(200))
    return [T for T in POINTS_200 if torsor.check_heights(T, B)]


def test_unit_point():
    T = torsor.lift((1, 1, 1, -1, -1))
    assert T.eta == (1,) * 7 and (T.alpha1, T.alpha2, T.alpha4) == (-1, 0, 1)
    assert tuple(torsor.to_point(T)) == (1, 1, 1, -1, -1)


@pytest.mark.parametrize("B", list(range(1, 41)) + [77, 100])
def test_four_counts_agree(B):
    n = torsor.count(B)
    assert n == sum(1 for _ in torsor.iter_points(B))
    assert n == torsor.count_reference(B)
    assert 2 * n == surface.count_direct(B).count


def test_every_point_satisfies_all_invariants():
    pts = points()
    assert len(pts) == torsor.count(200)
    for T in pts:
        eq = torsor.check_equations(T)
        assert eq and eq.alpha3_integral and eq.auxiliary
        assert torsor.check_coprimality(T) and torsor.check_coprim123(T)
        assert torsor.check_heights(T, 200)
        assert T.alpha1 != 0


def test_alpha3_is_derived():
    T = torsor.lift((1, 1, 1, -1, -1))
    assert T.alpha3 == 0
    T = torsor.lift((1, 1, 1, 1, 3))
    assert T.alpha3 == 2


def test_lift_rejects_points_off_region():
    with pytest.raises(InvariantError) as e:
        torsor.lift((1, 1, 1, 0, 0))
    assert e.value.invariant
    with pytest.raises((InvariantError, ValueError)):
        torsor.lift((1, 2, 1, 1, 1))


def test_to_point_names_violated_condition():
    T = TorsorPoint(2, 1, 1, 1, 1, 2, 1, 1, 1, 1)
    with pytest.raises(InvariantError) as e:
        torsor.to_point(T)
    assert e.value.invariant.startswith(("torsor", "gcd"))
    bad = torsor.failed_coprimality(T)
    assert "gcd5" in bad


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_round_trip_random_point(k):
    pts = points()
    T = pts[k % len(pts)]
    assert torsor.lift(torsor.to_point(T)) == T


def test_height_bounds_exact():
    hb = torsor.HeightBounds.of((1, 1, 1, 1, 1), 100)
    assert hb.A2 == 1 and hb.Y6_sq == 100 and hb.Y7 == 10.0


@pytest.mark.parametrize("B", [0, -1])
def test_bad_height(B):
    with pytest.raises(ValueError):
        torsor.count(B)


def test_lift_needs_positive_x0_x2():
    x = (1, 1, 1, 1, 3)
    assert surface.on_surface(x)
    with pytest.raises(InvariantError, match="x0, x1, x2 > 0"):
        torsor.lift((1, 1, -1, 1, -3))
    assert torsor.lift(tuple(-c for c in x)) == torsor.lift(x)
