"""The quartic del Pezzo surface V in P^4 and direct point counts.

V is cut out by x0 x1 - x2^2 = 0 and (x0 + x1 + x3) x3 - x2 x4 = 0.  The
counting region is x0 x1 x2 x3 != 0.
"""
from __future__ import annotations

import math
import time
from dataclasses import astuple, dataclass
from functools import reduce

from . import kernels
from ._accel import INT64_SAFE_B


@dataclass(frozen=True)
class SurfacePoint:
    x0: int
    x1: int
    x2: int
    x3: int
    x4: int

    def __post_init__(self):
        xs = astuple(self)
        if reduce(math.gcd, xs) != 1:
            raise ValueError(f"{xs} is not primitive")
        first = next(x for x in xs if x)
        if first < 0:
            raise ValueError(f"{xs} is not in canonical sign (use SurfacePoint.canonical)")

    @classmethod
    def canonical(cls, coords):
        """Primitive representative whose first nonzero coordinate is positive."""
        xs = tuple(int(x) for x in coords)
        if len(xs) != 5 or not any(xs):
            raise ValueError(f"need a nonzero 5-tuple, got {coords}")
        g = reduce(math.gcd, xs)
        sign = 1 if next(x for x in xs if x) > 0 else -1
        return cls(*(sign * x // g for x in xs))

    def __iter__(self):
        return iter(astuple(self))


@dataclass
class CountResult:
    B: int
    count: int
    elapsed: float


def on_surface(x) -> bool:
    x0, x1, x2, x3, x4 = x
    return x0 * x1 - x2 * x2 == 0 and (x0 + x1 + x3) * x3 - x2 * x4 == 0


def in_counting_region(x) -> bool:
    x0, x1, x2, x3, _ = x
    return x0 * x1 * x2 * x3 != 0


def height(x) -> int:
    return max(abs(int(c)) for c in x)


def _check_B(B):
    if int(B) != B or B < 1:
        raise ValueError(f"B must be a positive integer, got {B!r}")
    return int(B)


def iter_direct(B):
    """Points with x0, x2 > 0, x3 != 0 and height <= B (python ints throughout).

    x0 x1 = x2^2 is parametrized as (y a^2, y b^2, y a b) with gcd(a, b) = 1;
    then x4 is solved from the second quadric for each x3.
    """
    B = _check_B(B)
    for y in range(1, B + 1):
        amax = math.isqrt(B // y)
        for a in range(1, amax + 1):
            for b in range(1, amax + 1):
                if math.gcd(a, b) != 1:
                    continue
                x0, x1, x2 = y * a * a, y * b * b, y * a * b
                s = x0 + x1
                for x3 in range(-B, B + 1):
                    if x3 == 0:
                        continue
                    num = (s + x3) * x3
                    if num % x2:
                        continue
                    x4 = num // x2
                    if abs(x4) <= B and math.gcd(math.gcd(y, x3), x4) == 1:
                        yield SurfacePoint(x0, x1, x2, x3, x4)


def count_direct(B) -> CountResult:
    """N_{U,H}(B): twice the number of counted points with x0, x2 > 0."""
    B = _check_B(B)
    t = time.perf_counter()
    if B <= INT64_SAFE_B:
        half = kernels.count_direct_half(B)
    else:  # pragma: no cover - far beyond reachable heights
        half = sum(1 for _ in iter_direct(B))
    return CountResult(B, 2 * half, time.perf_counter() - t)


def count_bruteforce(B) -> int:
    """Exhaustive count over all |x_i| <= B; only feasible for tiny B."""
    B = _check_B(B)
    rng = range(-B, B + 1)
    total = 0
    for x0 in range(1, B + 1):  # canonical sign, and x0 != 0 in the region
        for x1 in rng:
            for x2 in rng:
                if x0 * x1 != x2 * x2 or x1 == 0 or x2 == 0:
                    continue
                for x3 in rng:
                    if x3 == 0:
                        continue
                    for x4 in rng:
                        x = (x0, x1, x2, x3, x4)
                        if on_surface(x) and reduce(math.gcd, x) == 1:
                            total += 1
    return total


def count_conic(B) -> int:
    """Points (a^2 : b^2 : +-ab : 0 : 0) of height <= B on the conic x3 = x4 = 0.

    Diagnostic only: these are outside the counting region.
    """
    B = _check_B(B)
    r = math.isqrt(B)
    pairs = sum(1 for a in range(1, r + 1) for b in range(1, r + 1) if math.gcd(a, b) == 1)
    return 2 * pairs
