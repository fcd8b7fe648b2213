"""Arithmetic functions and summation helpers.

Everything exact is a :class:`fractions.Fraction`.  The phi-type functions
only depend on the set of primes dividing their argument, so they are built
on :func:`prime_divisors`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, NamedTuple, Optional

import numpy as np

SIEVE_LIMIT = 10**6

ONE = Fraction(1)


# ---------------------------------------------------------------------------
# factorization

@lru_cache(maxsize=1)
def _spf_table():
    spf = np.zeros(SIEVE_LIMIT + 1, dtype=np.int32)
    spf[1] = 1
    for p in range(2, math.isqrt(SIEVE_LIMIT) + 1):
        if spf[p] == 0:
            block = spf[p * p::p]
            block[block == 0] = p
            spf[p] = p
    rest = np.nonzero(spf == 0)[0]
    spf[rest] = rest
    return spf


class FactoredInteger(NamedTuple):
    value: int
    factors: tuple  # ((p, e), ...), p strictly increasing

    @property
    def radical(self):
        return math.prod(p for p, _ in self.factors)


def factorize(n: int) -> FactoredInteger:
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    out = []
    m = n
    if m <= SIEVE_LIMIT:
        spf = _spf_table()
        while m > 1:
            p = int(spf[m])
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        return FactoredInteger(n, tuple(out))
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return FactoredInteger(n, tuple(out))


@lru_cache(maxsize=1 << 16)
def prime_divisors(n: int) -> tuple:
    return tuple(p for p, _ in factorize(n).factors)


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n).factors == ((n, 1),)


def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if sieve[p]:
            sieve[p * p::2 * p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


@lru_cache(maxsize=4)
def phi_star_table(X: int) -> np.ndarray:
    """Float phi_star(n) for 0 <= n <= X (entry 0 unused), by a prime sieve."""
    out = np.ones(X + 1, dtype=float)
    for p in primes_upto(X).tolist():
        out[p::p] *= 1.0 - 1.0 / p
    out.setflags(write=False)
    return out


def divisors(n: int) -> list:
    divs = [1]
    for p, e in factorize(n).factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def _check_positive(n):
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")


# ---------------------------------------------------------------------------
# the four phi products

@lru_cache(maxsize=1 << 16)
def phi_star(n: int) -> Fraction:
    """prod over p | n of (1 - 1/p)."""
    _check_positive(n)
    out = ONE
    for p in prime_divisors(n):
        out *= Fraction(p - 1, p)
    return out


@lru_cache(maxsize=1 << 16)
def phi_circ(n: int) -> Fraction:
    """prod over odd p | n of (1 - 1/(p-1))."""
    _check_positive(n)
    out = ONE
    for p in prime_divisors(n):
        if p != 2:
            out *= Fraction(p - 2, p - 1)
    return out


@lru_cache(maxsize=1 << 16)
def phi_dag(n: int) -> Fraction:
    """prod over p | n of (1 - 1/p^2)."""
    _check_positive(n)
    out = ONE
    for p in prime_divisors(n):
        out *= Fraction(p * p - 1, p * p)
    return out


@lru_cache(maxsize=1 << 16)
def phi_flat(n: int) -> Fraction:
    """prod over odd p | n of (1 + 1/(p(p-2)))."""
    _check_positive(n)
    out = ONE
    for p in prime_divisors(n):
        if p != 2:
            out *= Fraction(p * (p - 2) + 1, p * (p - 2))
    return out


def mobius(n: int) -> int:
    _check_positive(n)
    fac = factorize(n).factors
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def sigma_minus(delta, n: int) -> float:
    """sum over k | n of k^(-delta)."""
    _check_positive(n)
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    d = float(delta)
    return math.fsum(k ** -d for k in divisors(n))


# ---------------------------------------------------------------------------
# psi and its mean values

def psi(a: int, b: int, n: int) -> Fraction:
    if math.gcd(n, b) != 1:
        return Fraction(0)
    return 1 / phi_circ(math.gcd(a, n))


def psi_prime(a: int, b: int, n: int) -> Fraction:
    if math.gcd(n, b) != 1:
        return Fraction(0)
    g = math.gcd(a, n)
    return phi_star(n) / (phi_circ(g) * phi_star(g))


def Psi(a: int, b: int) -> Fraction:
    """Mean value of psi(a, b, .)."""
    _check_positive(a)
    _check_positive(b)
    return phi_star(b) * phi_flat(a) / phi_flat(math.gcd(a, b))


class ZetaScaled(NamedTuple):
    """``cofactor * zeta(2)**zeta2_power``, with the zeta factor kept symbolic."""
    cofactor: Fraction
    zeta2_power: int = -1

    def __float__(self):
        return float(self.cofactor) * (math.pi ** 2 / 6) ** self.zeta2_power


def Psi_prime(a: int, b: int) -> ZetaScaled:
    """Mean value of psi_prime(a, b, .): a rational times 1/zeta(2)."""
    return ZetaScaled(Psi(a, b) / phi_dag(a * b), -1)


# ---------------------------------------------------------------------------
# Dirichlet convolution with mu

def convolve_mu(f: Callable[[int], Fraction], n: int) -> Fraction:
    """(f * mu)(n) = sum over d | n of f(n/d) mu(d)."""
    _check_positive(n)
    total = Fraction(0)
    for d in divisors(n):
        mu = mobius(d)
        if mu:
            total += mu * Fraction(f(n // d))
    return total


def psi_mu_closed(a: int, b: int, n: int) -> Fraction:
    """Closed form of (psi_{a,b} * mu)(n)."""
    mu = mobius(n)
    if mu == 0 or (a * b) % n:
        return Fraction(0)
    if n % 2 == 0 and b % 2:
        return Fraction(0)
    out = Fraction(mu)
    for p in prime_divisors(math.gcd(a, n)):
        if b % p:
            out *= Fraction(-1, p - 2)
    return out


def psi_prime_mu_closed(a: int, b: int, n: int) -> Fraction:
    """Closed form of (psi'_{a,b} * mu)(n)."""
    mu = mobius(n)
    if mu == 0:
        return Fraction(0)
    f = Fraction(mu)
    for p in prime_divisors(n):
        if p == 2:
            continue
        if (a * b) % p:
            f /= p
        elif a % p == 0 and b % p:
            f *= Fraction(-1, p - 2)
    if n % 2 or b % 2 == 0:
        return f
    if (a * b) % 2:
        return f / 2
    return Fraction(0)


# ---------------------------------------------------------------------------
# partial sums

def _psi_gcd_counts(a, b, X, even=False):
    """{gcd(a, n): #n <= X with gcd(n, b) = 1 (n even if asked)}."""
    n = np.arange(2 if even else 1, X + 1, 2 if even else 1, dtype=np.int64)
    n = n[np.gcd(n, b) == 1]
    g, cnt = np.unique(np.gcd(n, a), return_counts=True)
    return dict(zip(g.tolist(), cnt.tolist()))


def sum_psi(a: int, b: int, X, even: bool = False) -> Fraction:
    """Exact sum of psi_{a,b}(n) over 1 <= n <= X (only even n if ``even``)."""
    X = math.floor(X)
    if X < 1:
        return Fraction(0)
    return sum((c / phi_circ(g) for g, c in _psi_gcd_counts(a, b, X, even).items()),
               Fraction(0))


def sum_psi_prime(a: int, b: int, X, even: bool = False) -> Fraction:
    """Exact sum of psi'_{a,b}(n) over 1 <= n <= X (only even n if ``even``)."""
    X = math.floor(X)
    total = Fraction(0)
    for n in range(2 if even else 1, X + 1, 2 if even else 1):
        if math.gcd(n, b) == 1:
            total += psi_prime(a, b, n)
    return total


def psi_values(a: int, b: int, n: np.ndarray, prime: bool = False) -> np.ndarray:
    """Float psi (or psi') at every entry of ``n``; for weighted sums."""
    n = np.asarray(n, dtype=np.int64)
    out = np.zeros(n.shape, dtype=float)
    ok = np.gcd(n, b) == 1
    g = np.gcd(n, a)
    for gv in np.unique(g[ok]).tolist():
        out[ok & (g == gv)] = 1.0 / float(phi_circ(gv))
    if prime and n.size:
        # phi_star(n) / phi_star(gcd(a, n))
        table = phi_star_table(int(n.max()))
        out[ok] *= table[n[ok]] / table[g[ok]]
    return out


# ---------------------------------------------------------------------------
# weighted sums (partial summation lemma and its even variant)

@dataclass(frozen=True)
class Weight:
    """A test weight g with the number of sign changes of g' on the interval."""
    fn: Callable
    sign_changes: Optional[int]
    name: str = "g"
    sup: Optional[Callable] = None  # (t1, t2) -> sup |g| on [t1, t2]

    def sup_on(self, t1, t2):
        if self.sup is not None:
            return self.sup(t1, t2)
        if self.sign_changes == 0:
            return max(abs(self.fn(t1)), abs(self.fn(t2)))
        raise ValueError(f"weight {self.name} needs an explicit sup")


CONSTANT = Weight(lambda t: np.ones_like(t, dtype=float) if isinstance(t, np.ndarray) else 1.0,
                  0, "1")
RECIPROCAL = Weight(lambda t: 1.0 / t, 0, "1/t")
INV_SQRT = Weight(lambda t: 1.0 / np.sqrt(t), 0, "t^-1/2")


@dataclass
class SumReport:
    a: int
    b: int
    weight: str
    interval: tuple
    observed: float
    main: float
    residual: float
    scale: float
    normalized: float
    meta: dict = field(default_factory=dict)


def weighted_sum_check(a: int, b: int, g: Weight, I, *, prime: bool = False,
                       even: bool = False, delta=Fraction(1, 2)) -> SumReport:
    """Compare sum over n in I of psi(n) g(n) with its main term.

    The normalization is sigma_{-delta}(ab) * t2^delta * M_I(g) (with b in
    place of ab for psi'), where M_I(g) = (1 + R_g) sup |g|.
    """
    from scipy.integrate import quad

    if not isinstance(g, Weight) or g.sign_changes is None:
        raise ValueError("weight must carry a sign-change count")
    t1, t2 = I
    if even and b % 2 == 0:
        raise ValueError("the even-restricted sum needs b odd")
    if even and prime and a % 2:
        raise ValueError("the even-restricted psi' sum needs a even")
    lo = max(1, math.ceil(t1))
    n = np.arange(lo, math.floor(t2) + 1, dtype=np.int64)
    if even:
        n = n[n % 2 == 0]
    vals = psi_values(a, b, n, prime=prime) * g.fn(n.astype(float))
    observed = math.fsum(vals.tolist())
    integral = quad(g.fn, t1, t2, limit=200)[0]
    density = float(Psi_prime(a, b)) if prime else float(Psi(a, b))
    main = density * integral * (0.5 if even else 1.0)
    M = (1 + g.sign_changes) * g.sup_on(max(t1, 1e-300), t2)
    scale = sigma_minus(delta, b if prime else a * b) * t2 ** float(delta) * M
    res = observed - main
    return SumReport(a, b, g.name, (t1, t2), observed, main, res, scale, abs(res) / scale,
                     {"prime": prime, "even": even, "delta": str(delta)})


def normalized_residual(a, b, X, *, prime=False, even=False, delta=Fraction(1, 2)):
    """|S(X) - mean * X| / (sigma_{-delta} * X^delta) for the unweighted sums."""
    if prime:
        n = np.arange(2 if even else 1, math.floor(X) + 1, 2 if even else 1)
        S = math.fsum(psi_values(a, b, n, prime=True).tolist())
        mean = float(Psi_prime(a, b))
        sig = sigma_minus(delta, b)
    else:
        S = sum_psi(a, b, X, even)
        mean = float(Psi(a, b))
        sig = sigma_minus(delta, a * b)
    if even:
        mean /= 2
    return abs(float(S) - mean * X) / (sig * X ** float(delta))


# ---------------------------------------------------------------------------
# theta functions

def _prod_one_minus_inv_pm1(n, excl):
    """prod over p | n, p not dividing excl, of (1 - 1/(p-1))."""
    out = ONE
    for p in prime_divisors(n):
        if excl % p:
            out *= Fraction(p - 2, p - 1)
    return out


def theta1(eta, eta6) -> Fraction:
    e1, e2, e3, e4, e5 = eta
    return (phi_star(e1 * e2 * e3 * e4 * e5)
            * phi_star(math.gcd(e1, e4)) / phi_star(e4)
            * phi_star(math.gcd(e3, e5)) / phi_star(e5)
            * _prod_one_minus_inv_pm1(e3, e2 * e5 * eta6))


def theta(eta7tuple) -> Fraction:
    """Arithmetic density of the alpha2 lattice for fixed eta'."""
    e1, e2, e3, e4, e5, e6, e7 = eta7tuple
    return theta1((e1, e2, e3, e4, e5), e6) * _prod_one_minus_inv_pm1(e1, e2 * e4 * e7)


def theta_bruteforce(eta7tuple) -> Fraction:
    """Triple Moebius sum over k1 | eta3, k4 | eta1, k2 | eta1 eta2 eta3."""
    e1, e2, e3, e4, e5, e6, e7 = eta7tuple
    total = Fraction(0)
    for k1 in divisors(e3):
        mu1 = mobius(k1)
        if not mu1 or math.gcd(k1, e1 * e2 * e4 * e6) != 1:
            continue
        for k4 in divisors(e1):
            mu4 = mobius(k4)
            if not mu4 or math.gcd(k4, e2 * e3 * e5 * e7) != 1:
                continue
            inner = Fraction(0)
            for k2 in divisors(e1 * e2 * e3):
                mu2 = mobius(k2)
                if mu2 and math.gcd(k2, k1 * k4 * e4 * e5) == 1:
                    inner += Fraction(mu2, k2)
            total += Fraction(mu1 * mu4, k1 * k4) * inner
    return total


def theta1_prime(eta) -> Fraction:
    e1, e2, e3, e4, e5 = eta
    return (phi_star(e1 * e2 * e3 * e4 * e5) * phi_star(e2 * e3 * e4 * e5)
            * phi_star(e1 * e2) / phi_star(e2 * e4)
            * phi_star(math.gcd(e3, e5)) / phi_star(e5))


def theta2_prime(eta, eta6) -> Fraction:
    e3 = eta[2]
    e2, e5 = eta[1], eta[4]
    return (phi_star(eta6) / phi_star(math.gcd(eta6, e3))
            * _prod_one_minus_inv_pm1(e3, e2 * e5 * eta6))


def coprime_gcd67(eta) -> bool:
    e1, e2, e3, e4, e5 = eta
    return math.gcd(e1 * e4, e3 * e5) == 1 and math.gcd(e2, e4 * e5) == 1


def Theta(eta) -> Fraction:
    """Density after summing eta6 and eta7 (zero off gcd6/gcd7)."""
    if not coprime_gcd67(eta):
        return Fraction(0)
    e1, e2, e3, e4, e5 = eta
    full = e1 * e2 * e3 * e4 * e5
    return (phi_star(full) / phi_dag(full)
            * phi_star(e2 * e3 * e4 * e5) * phi_star(e1 * e2 * e4 * e5)
            * phi_star(e1 * e2) / phi_star(e2 * e4)
            * phi_star(e2 * e3) / phi_star(e2 * e5))


def theta_eta6_factored(eta, eta6) -> Fraction:
    """theta1 * phi_circ ratio * Psi(eta1, eta2..eta6), with the 1/2 of the even case.

    Equals theta1_prime(eta) * theta2_prime(eta, eta6) under gcd4-gcd7.
    """
    e1, e2, e3, e4, e5 = eta
    val = (theta1(eta, eta6) * phi_circ(e1) / phi_circ(math.gcd(e1, e2 * e4))
           * Psi(e1, e2 * e3 * e4 * e5 * eta6))
    return val if in_N(e1, e2, e4) else val / 2


def Theta_factored(eta) -> Fraction:
    """zeta(2) * theta1' * phi_circ ratio * Psi'(eta3, eta1 eta2 eta4 eta5), even case halved."""
    e1, e2, e3, e4, e5 = eta
    val = (theta1_prime(eta) * phi_circ(e3) / phi_circ(math.gcd(e3, e2 * e5))
           * Psi_prime(e3, e1 * e2 * e4 * e5).cofactor)
    return val if in_M(e3, e2, e5) else val / 2


def in_N(e1, e2, e4) -> bool:
    return e1 % 2 == 1 or (e2 * e4) % 2 == 0


def in_M(e3, e2, e5) -> bool:
    return e3 % 2 == 1 or (e2 * e5) % 2 == 0


def parity_ratio(n: int, m: int) -> Fraction:
    """phi_circ phi_flat (n) / phi_circ phi_flat (gcd(n, m)) over phi_star of the same."""
    g = math.gcd(n, m)
    lhs = phi_circ(n) * phi_flat(n) / (phi_circ(g) * phi_flat(g))
    return lhs / (phi_star(n) / phi_star(g))


def parity_identity_N(e1, e2, e4) -> bool:
    """The phi_circ phi_flat ratio is phi_star's inside N and twice it outside."""
    return parity_ratio(e1, e2 * e4) == (1 if in_N(e1, e2, e4) else 2)


def parity_identity_M(e3, e2, e5) -> bool:
    return parity_ratio(e3, e2 * e5) == (1 if in_M(e3, e2, e5) else 2)


def aggregation_sum(a: int, b: int, c: int) -> Fraction:
    """sum over k | a, gcd(k, c) = 1 of mu(k) / (k phi_star(k b))."""
    total = Fraction(0)
    for k in divisors(a):
        mu = mobius(k)
        if mu and math.gcd(k, c) == 1:
            total += mu / (k * phi_star(k * b))
    return total


def aggregation_closed(a: int, b: int, c: int) -> Fraction:
    g = math.gcd(a, b)
    return (phi_star(g) / (phi_star(b) * phi_star(math.gcd(g, c)))
            * _prod_one_minus_inv_pm1(a, b * c))


def theta_local_sum(p: int) -> Fraction:
    """sum over k in Z_{>=0}^5 of Theta(p^k1, ..., p^k5) / p^(k1+...+k5).

    Theta only sees which exponents are positive; each positive slot
    contributes the geometric series 1/(p - 1).
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    total = Fraction(0)
    for pattern in product((0, 1), repeat=5):
        val = Theta(tuple(p if k else 1 for k in pattern))
        if val:
            total += val * Fraction(1, p - 1) ** sum(pattern)
    return total


def theta_mu_local(p: int, k) -> Fraction:
    """(Theta * mu)(p^k1, ..., p^k5) with the 5-variable Moebius function."""
    total = Fraction(0)
    for e in product((0, 1), repeat=5):
        if any(ei > ki for ei, ki in zip(e, k)):
            continue
        arg = tuple(p ** (ki - ei) for ki, ei in zip(k, e))
        total += (-1) ** sum(e) * Theta(arg)
    return total
