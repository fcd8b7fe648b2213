"""Integral points on the universal torsor and the bijection with V(Q).

A torsor point is (eta1..eta7, alpha1, alpha2, alpha4) with every eta > 0 and
alpha1 != 0.  It satisfies

    eta1^2 eta2 eta4^2 eta7 + eta5 alpha1 - eta6 alpha2 = 0
    eta2 eta3^2 eta5^2 eta6 + eta7 alpha2 - eta4 alpha4 = 0

and maps to the point with coordinates

    x0 = eta1 eta2^2 eta3^3 eta5^2 eta6^2
    x1 = eta1^3 eta2^2 eta3 eta4^2 eta7^2
    x2 = eta1^2 eta2^2 eta3^2 eta4 eta5 eta6 eta7
    x3 = eta1 eta2 eta3 eta5 eta7 alpha1
    x4 = alpha1 alpha4.

Each point with x0 x1 x2 x3 != 0 and x2 > 0 has exactly one such lift, so
N(B) = 2 #T(B).
"""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass
from fractions import Fraction
from functools import reduce

from . import kernels
from ._accel import INT64_SAFE_B
from .surface import SurfacePoint, in_counting_region, on_surface


class InvariantError(ValueError):
    """A torsor point or a lift violates a named defining condition."""

    def __init__(self, invariant, detail=""):
        self.invariant = invariant
        super().__init__(f"{invariant} violated" + (f": {detail}" if detail else ""))


@dataclass(frozen=True)
class TorsorPoint:
    eta1: int
    eta2: int
    eta3: int
    eta4: int
    eta5: int
    eta6: int
    eta7: int
    alpha1: int
    alpha2: int
    alpha4: int

    @property
    def eta(self):
        return astuple(self)[:7]

    @property
    def alpha3(self) -> Fraction:
        e1, e2, e3, e4, e5, e6, e7 = self.eta
        return Fraction(e2 * e3**2 * e5 * e6**2 + e7 * self.alpha1, e4)


@dataclass(frozen=True)
class HeightBounds:
    """A2 exactly; Y6 and Y7 through their (rational) squares."""

    A2: int
    Y6_sq: Fraction
    Y7_sq: Fraction

    @classmethod
    def of(cls, eta, B):
        e1, e2, e3, e4, e5 = eta[:5]
        return cls(e1 * e2 * e3 * e4 * e5,
                   Fraction(B, e1 * e2**2 * e3**3 * e5**2),
                   Fraction(B, e1**3 * e2**2 * e3 * e4**2))

    @property
    def Y6(self):
        return math.sqrt(self.Y6_sq)

    @property
    def Y7(self):
        return math.sqrt(self.Y7_sq)


def _torsor_residuals(T):
    e1, e2, e3, e4, e5, e6, e7 = T.eta
    r1 = e1**2 * e2 * e4**2 * e7 + e5 * T.alpha1 - e6 * T.alpha2
    r2 = e2 * e3**2 * e5**2 * e6 + e7 * T.alpha2 - e4 * T.alpha4
    return r1, r2


@dataclass(frozen=True)
class EquationReport:
    torsor1: bool
    torsor2: bool
    alpha3_integral: bool
    auxiliary: bool

    def __bool__(self):
        return self.torsor1 and self.torsor2


def check_equations(T: TorsorPoint) -> EquationReport:
    """Both torsor equations; also whether alpha3 is integral and the three
    relations through alpha3 hold.  Those follow from the first two whenever
    gcd(eta4, eta5) = 1, and are only reported, never used."""
    r1, r2 = _torsor_residuals(T)
    e1, e2, e3, e4, e5, e6, e7 = T.eta
    a1, a2, a4 = T.alpha1, T.alpha2, T.alpha4
    a3 = T.alpha3
    aux = (e2 * e3**2 * e5 * e6**2 + e7 * a1 - e4 * a3 == 0
           and e1**2 * e2 * e4 * e7**2 + e5 * a3 - e6 * a4 == 0
           and e1**2 * e2**2 * e3**2 * e4 * e5 * e6 * e7 + a1 * a4 - a2 * a3 == 0)
    return EquationReport(r1 == 0, r2 == 0, a3.denominator == 1,
                          a3.denominator == 1 and aux)


def _gcd_conditions(T):
    e1, e2, e3, e4, e5, e6, e7 = T.eta
    a1, a2, a4 = T.alpha1, T.alpha2, T.alpha4
    g = math.gcd
    return {
        "gcd1": g(a1, e1 * e2 * e3 * e4 * e6) == 1,
        "gcd2": g(a4, e1 * e2 * e3 * e5 * e7) == 1,
        "gcd3": g(a2, e1 * e2 * e3 * e4 * e5) == 1,
        "gcd4": g(e7, e2 * e3 * e4 * e5 * e6) == 1,
        "gcd5": g(e6, e1 * e2 * e4 * e5) == 1,
        "gcd6": g(e1 * e4, e3 * e5) == 1,
        "gcd7": g(e2, e4 * e5) == 1,
    }


def check_coprimality(T: TorsorPoint) -> bool:
    """The seven conditions gcd1..gcd7 used by the counting argument."""
    return all(_gcd_conditions(T).values())


def failed_coprimality(T: TorsorPoint) -> list:
    return [k for k, ok in _gcd_conditions(T).items() if not ok]


def check_coprim123(T: TorsorPoint) -> bool:
    """The three coprimality conditions that come out of the lift."""
    e1, e2, e3, e4, e5, e6, e7 = T.eta
    g = math.gcd
    return (g(e3 * e5 * e6, e1 * e4 * e7) == 1
            and g(e5 * e7, e2 * T.alpha4) == 1
            and g(e1 * e2 * e3, T.alpha1 * T.alpha4) == 1)


def check_heights(T: TorsorPoint, B) -> bool:
    """|x_i| <= B for every coordinate of the image."""
    e1, e2, e3, e4, e5, e6, e7 = T.eta
    a1 = abs(T.alpha1)
    return (e1 * e2**2 * e3**3 * e5**2 * e6**2 <= B
            and e1**3 * e2**2 * e3 * e4**2 * e7**2 <= B
            and e1 * e2 * e3 * e5 * e7 * a1 <= B
            and a1 * abs(T.alpha4) <= B)


def _validate(T):
    if any(e <= 0 for e in T.eta):
        raise InvariantError("eta positivity", f"eta={T.eta}")
    if T.alpha1 == 0:
        raise InvariantError("alpha1 != 0")
    r1, r2 = _torsor_residuals(T)
    if r1:
        raise InvariantError("torsor equation 1", f"residual {r1}")
    if r2:
        raise InvariantError("torsor equation 2", f"residual {r2}")
    bad = failed_coprimality(T)
    if bad:
        raise InvariantError(bad[0], f"T={T}")


def to_point(T: TorsorPoint) -> SurfacePoint:
    """Image of a valid torsor point; raises InvariantError naming the first
    violated condition otherwise."""
    _validate(T)
    e1, e2, e3, e4, e5, e6, e7 = T.eta
    x = (e1 * e2**2 * e3**3 * e5**2 * e6**2,
         e1**3 * e2**2 * e3 * e4**2 * e7**2,
         e1**2 * e2**2 * e3**2 * e4 * e5 * e6 * e7,
         e1 * e2 * e3 * e5 * e7 * T.alpha1,
         T.alpha1 * T.alpha4)
    return SurfacePoint(*x)


def _exact_div(a, b, what):
    q, r = divmod(a, b)
    if r:
        raise InvariantError(what, f"{b} does not divide {a}")
    return q


def lift(x) -> TorsorPoint:
    """The unique torsor point over x (up to the sign of x, with x2 > 0).

    Follows the factorization chain: x0 = y x0'^2, x1 = y x1'^2, then y is
    split along x3, and the remaining square-free parts along x0' and x1'.
    """
    xs = tuple(int(c) for c in x)
    if len(xs) != 5:
        raise ValueError("need five coordinates")
    if not on_surface(xs):
        raise InvariantError("on surface", f"{xs}")
    if not in_counting_region(xs):
        raise InvariantError("counting region x0 x1 x2 x3 != 0", f"{xs}")
    if reduce(math.gcd, xs) != 1:
        raise InvariantError("primitivity", f"{xs}")
    if xs[2] < 0:
        xs = tuple(-c for c in xs)
    if xs[0] < 0:
        raise InvariantError("x0, x1, x2 > 0 (up to overall sign)", f"{x}")
    x0, x1, x2, x3, x4 = xs
    y = math.gcd(x0, x1)
    x0p = math.isqrt(x0 // y)
    x1p = math.isqrt(x1 // y)
    if y * x0p * x0p != x0 or y * x1p * x1p != x1:
        raise InvariantError("x0 x1 = x2^2 factorization", f"{xs}")
    y1 = math.gcd(y, x3)
    eta2 = y // y1
    x3p = x3 // y1
    y2 = _exact_div(y1, eta2, "eta2 | y01'")
    eta3 = math.gcd(y2, x0p)
    eta1 = y2 // eta3
    x0pp = x0p // eta3
    x1pp = _exact_div(x1p, eta1, "eta1 | x1'")
    alpha1 = math.gcd(x3p, x4) if x3p > 0 else -math.gcd(x3p, x4)
    x3pp = x3p // alpha1
    alpha4 = x4 // alpha1
    eta5 = math.gcd(x3pp, x0pp)
    eta7 = x3pp // eta5
    eta6 = x0pp // eta5
    eta4 = _exact_div(x1pp, eta7, "eta7 | x1''")
    alpha2 = _exact_div(eta1**2 * eta2 * eta4**2 * eta7 + eta5 * alpha1, eta6,
                        "eta6 | torsor equation 1")
    T = TorsorPoint(eta1, eta2, eta3, eta4, eta5, eta6, eta7, alpha1, alpha2, alpha4)
    if tuple(to_point(T)) != xs:
        raise InvariantError("round trip", f"{xs} -> {T}")
    return T


# ---------------------------------------------------------------------------
# counting and enumeration

def _check_B(B):
    if int(B) != B or B < 1:
        raise ValueError(f"B must be a positive integer, got {B!r}")
    return int(B)


def count(B) -> int:
    """#T(B) through the compiled kernel (or its numpy twin)."""
    B = _check_B(B)
    if B > INT64_SAFE_B:
        return sum(1 for _ in iter_points(B))
    return kernels.count_torsor(B)


def _eta_outer(B):
    e1 = 1
    while e1**3 <= B:
        e2 = 1
        while e1**3 * e2**2 <= B:
            e3 = 1
            while e1**3 * e2**2 * e3 <= B and e1 * e2**2 * e3**3 <= B:
                yield e1, e2, e3
                e3 += 1
            e2 += 1
        e1 += 1


def iter_points(B):
    """Every point of T(B), with python integers.

    For each admissible eta, alpha2 runs through the residue class modulo
    eta4 eta5 that makes alpha1 and alpha4 integral, inside the exact integer
    window cut out by the bound on x3.
    """
    B = _check_B(B)
    g = math.gcd
    for e1, e2, e3 in _eta_outer(B):
        e123 = e1 * e2 * e3
        base5 = e1 * e2**2 * e3**3
        base7 = e1**3 * e2**2 * e3
        for e4 in range(1, math.isqrt(B // base7) + 1):
            if g(e2, e4) != 1 or g(e1 * e4, e3) != 1:
                continue
            e7max = math.isqrt(B // (base7 * e4 * e4))
            for e5 in range(1, math.isqrt(B // base5) + 1):
                if g(e2, e5) != 1 or g(e1 * e4, e5) != 1:
                    continue
                m = e4 * e5
                for e6 in range(1, math.isqrt(B // (base5 * e5 * e5)) + 1):
                    if g(e6, e1 * e2 * e4 * e5) != 1:
                        continue
                    Q = e2 * e3**2 * e5**2 * e6
                    for e7 in range(1, e7max + 1):
                        if g(e7, e2 * e3 * e4 * e5 * e6) != 1:
                            continue
                        P = e1**2 * e2 * e4**2 * e7
                        u = P * pow(e6, -1, e5) % e5
                        v = -Q * pow(e7, -1, e4) % e4
                        r = u + e5 * ((v - u) * pow(e5, -1, e4) % e4)
                        c3 = B // (e123 * e7)
                        lo = -((c3 - P) // e6)  # ceil((P - c3) / e6)
                        hi = (P + c3) // e6
                        a2 = lo + (r - lo) % m
                        while a2 <= hi:
                            L = e6 * a2 - P
                            if L:
                                T = TorsorPoint(e1, e2, e3, e4, e5, e6, e7, L // e5, a2,
                                                (Q + e7 * a2) // e4)
                                if (abs(T.alpha1 * T.alpha4) <= B
                                        and check_coprimality(T)):
                                    yield T
                            a2 += m


def count_reference(B) -> int:
    """#T(B) in the textbook loop order: eta, then alpha1, then alpha2 and
    alpha4 from the two equations, with coprim1..3 tested directly.

    Slow and deliberately naive; used as an oracle for the fast counters.
    """
    B = _check_B(B)
    g = math.gcd
    total = 0
    for e1, e2, e3 in _eta_outer(B):
        base5 = e1 * e2**2 * e3**3
        base7 = e1**3 * e2**2 * e3
        for e4 in range(1, math.isqrt(B // base7) + 1):
            for e5 in range(1, math.isqrt(B // base5) + 1):
                for e6 in range(1, math.isqrt(B // (base5 * e5 * e5)) + 1):
                    for e7 in range(1, math.isqrt(B // (base7 * e4 * e4)) + 1):
                        if g(e3 * e5 * e6, e1 * e4 * e7) != 1:
                            continue
                        P = e1**2 * e2 * e4**2 * e7
                        Q = e2 * e3**2 * e5**2 * e6
                        amax = B // (e1 * e2 * e3 * e5 * e7)
                        for a1 in range(-amax, amax + 1):
                            if a1 == 0:
                                continue
                            num = P + e5 * a1
                            if num % e6:
                                continue
                            a2 = num // e6
                            num = Q + e7 * a2
                            if num % e4:
                                continue
                            a4 = num // e4
                            if abs(a1 * a4) > B:
                                continue
                            if g(e5 * e7, e2 * a4) == 1 and g(e1 * e2 * e3, a1 * a4) == 1:
                                total += 1
    return total
