import math

import pytest
from hypothesis import given, strategies as st

from a3quartic import surface
from a3quartic.surface import SurfacePoint


@pytest.mark.parametrize("B", [1, 2, 3])
def test_direct_matches_exhaustive_search(B):
    assert surface.count_direct(B).count == surface.count_bruteforce(B)


def test_small_counts():
    assert [surface.count_direct(B).count for B in (1, 2, 3)] == [2, 4, 8]


@pytest.mark.parametrize("B", [1, 7, 30, 64])
def test_kernel_matches_python_enumerator(B):
    pts = list(surface.iter_direct(B))
    assert 2 * len(pts) == surface.count_direct(B).count
    assert len(set(pts)) == len(pts)
    for p in pts:
        assert surface.on_surface(p) and surface.in_counting_region(p)
        assert surface.height(p) <= B


def test_conic_points_lie_outside_region():
    assert surface.count_conic(1) == 2
    for B in (1, 4, 50):
        r = math.isqrt(B)
        pairs = sum(math.gcd(a, b) == 1 for a in range(1, r + 1) for b in range(1, r + 1))
        assert surface.count_conic(B) == 2 * pairs
    assert not surface.in_counting_region((1, 1, 1, 0, 0))
    assert surface.on_surface((4, 1, -2, 0, 0))


@given(st.lists(st.integers(-50, 50), min_size=5, max_size=5).filter(any),
       st.integers(1, 9).map(lambda k: k if k % 2 else -k))
def test_canonical_representative(xs, scale):
    a = SurfacePoint.canonical(xs)
    b = SurfacePoint.canonical([scale * x for x in xs])
    assert a == b
    assert next(x for x in a if x) > 0


def test_point_validation():
    with pytest.raises(ValueError, match="primitive"):
        SurfacePoint(2, 2, 2, 2, 4)
    with pytest.raises(ValueError, match="canonical"):
        SurfacePoint(-1, -1, 1, 1, 1)
    with pytest.raises(ValueError):
        SurfacePoint.canonical((0, 0, 0, 0, 0))


@pytest.mark.parametrize("B", [0, -3, 2.5])
def test_bad_height(B):
    with pytest.raises(ValueError):
        surface.count_direct(B)
