import itertools
from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from a3quartic import polytope


def test_alpha_exact():
    assert polytope.polytope_alpha() == Fraction(1, 2160)
    assert polytope.polytope_alpha() == 2 * Fraction(1, 4320)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_simplex_and_cube(n):
    eye = [[-1 if j == i else 0 for j in range(n)] for i in range(n)]
    simplex = eye + [[1] * n]
    assert polytope.volume(simplex, [0] * n + [1]) == Fraction(1, factorial(n))
    cube = eye + [[1 if j == i else 0 for j in range(n)] for i in range(n)]
    assert polytope.volume(cube, [0] * n + [1] * n) == 1


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=3, max_size=3),
       st.lists(st.integers(1, 6), min_size=3, max_size=3))
def test_two_row_polytope_against_lattice_count(r1, r2):
    """Volume of {t >= 0, r1.t <= 1, r2.t <= 1} against a fine midpoint grid."""
    A = [[-1, 0, 0], [0, -1, 0], [0, 0, -1], r1, r2]
    v = polytope.volume(A, [0, 0, 0, 1, 1])
    m = 60
    hits = sum(1 for i, j, k in itertools.product(range(m), repeat=3)
               if all(sum(c * (x + 0.5) / m for c, x in zip(r, (i, j, k))) <= 1 for r in (r1, r2)))
    assert abs(hits / m**3 - float(v)) < 0.02


def test_monte_carlo_reproducible_and_consistent():
    a = polytope.polytope_alpha_mc(2 * 10**5, seed=3)
    b = polytope.polytope_alpha_mc(2 * 10**5, seed=3)
    assert a == b
    est, se = a
    assert abs(est - 1 / 2160) < 4 * se


def test_bounding_box():
    assert polytope.bounding_box() == [Fraction(1, 3), Fraction(1, 2), Fraction(1, 3),
                                       Fraction(1, 2), Fraction(1, 2)]
