"""Archimedean and p-adic densities and the leading constant.

The real density reduces to a 2-d integral of ``g1``, the length of the
u2-slice of {h <= 1}; ``g1`` has a closed form built from three quadratic
inequalities.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
from scipy import integrate

from . import arithfun
from .polytope import polytope_alpha

ALPHA_TILDE = Fraction(1, 4320)
BETA = Fraction(1)
PICARD_RANK = 6

# |log((1 - 1/p)^6 (1 + 6/p + 1/p^2))| <= TAIL_C / p^2 for every p >= 7
TAIL_C = 20


def h(u2, t7, t6):
    d = t7 - t6 * u2
    return max(t6, t7, t7 * abs(d), abs(d) * abs(t6 + t7 * u2))


def _roots(a, b, c, disc):
    """Roots of a x^2 + b x + c (a > 0) given a precomputed discriminant >= 0."""
    sq = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(sq, b))
    if q == 0.0:
        return 0.0, 0.0
    r1, r2 = q / a, c / q
    return (r1, r2) if r1 <= r2 else (r2, r1)


def _piece(L, H, left, right, exact):
    """Length of [left, right] within [L, H]; ``exact`` is right - left."""
    if L <= left and right <= H:
        return exact
    return max(0.0, min(H, right) - max(L, left))


def g1(t7, t6):
    """Length of {u2 : h(u2, t7, t6) <= 1}.

    With d = t7 - t6 u the set is cut out by t7 |d| <= 1 (an interval [L, H])
    and -1 <= d (t6 + t7 u) <= 1.  The second pair is two quadratics in u
    with the same leading terms: the outer roots r1 < r2 bound the lower
    inequality and, when real, the inner roots e1 < e2 cut an open gap out
    of it.  Piece lengths are taken from the root formulas rather than by
    subtracting endpoints, since for small t6 the endpoints are of size
    1/t6 while the pieces are of size 1/t7^2.
    """
    if t6 <= 0 or t7 <= 0:
        raise ValueError("g1 is defined for t6, t7 > 0")
    if t6 > 1 or t7 > 1:
        return 0.0
    A = t6 * t7
    b = t7 * t7 - t6 * t6
    L = (t7 - 1.0 / t7) / t6
    H = (t7 + 1.0 / t7) / t6
    s = t6 * t6 + t7 * t7
    D1 = s * s + 4.0 * A
    r1, r2 = _roots(A, -b, -(1.0 + A), D1)
    # the discriminant of the inner pair is factored to avoid cancellation
    w = 2.0 * math.sqrt(A)
    D2 = (s - w) * (s + w)
    if D2 <= 0.0:
        return _piece(L, H, r1, r2, math.sqrt(D1) / A)
    e1, e2 = _roots(A, -b, 1.0 - A, D2)
    # e1 - r1 = r2 - e2 = (sqrt D1 - sqrt D2) / 2A, and D1 - D2 = 8A
    side = 4.0 / (math.sqrt(D1) + math.sqrt(D2))
    return _piece(L, H, r1, e1, side) + _piece(L, H, e2, r2, side)


def _np_roots(a, b, c, disc):
    sq = np.sqrt(np.maximum(disc, 0.0))
    q = -0.5 * (b + np.copysign(sq, b))
    safe = np.where(q == 0.0, 1.0, q)
    r1 = np.where(q == 0.0, 0.0, q / a)
    r2 = np.where(q == 0.0, 0.0, c / safe)
    return np.minimum(r1, r2), np.maximum(r1, r2)


def _np_piece(L, H, left, right, exact):
    inside = (L <= left) & (right <= H)
    return np.where(inside, exact, np.maximum(0.0, np.minimum(H, right) - np.maximum(L, left)))


def g1_array(t7, t6):
    """Vectorized ``g1`` (broadcasts t7 against t6)."""
    t7, t6 = np.broadcast_arrays(np.asarray(t7, dtype=float), np.asarray(t6, dtype=float))
    if np.any(t6 <= 0) or np.any(t7 <= 0):
        raise ValueError("g1 is defined for t6, t7 > 0")
    A = t6 * t7
    b = t7 * t7 - t6 * t6
    L = (t7 - 1.0 / t7) / t6
    H = (t7 + 1.0 / t7) / t6
    s = t6 * t6 + t7 * t7
    D1 = s * s + 4.0 * A
    r1, r2 = _np_roots(A, -b, -(1.0 + A), D1)
    w = 2.0 * np.sqrt(A)
    D2 = (s - w) * (s + w)
    e1, e2 = _np_roots(A, -b, 1.0 - A, D2)
    side = 4.0 / (np.sqrt(D1) + np.sqrt(np.maximum(D2, 0.0)))
    split = _np_piece(L, H, r1, e1, side) + _np_piece(L, H, e2, r2, side)
    whole = _np_piece(L, H, r1, r2, np.sqrt(D1) / A)
    length = np.where(D2 <= 0.0, whole, split)
    return np.where((t6 > 1) | (t7 > 1), 0.0, length)


def _g1_config(t7, t6):
    """Integer code of which closed-form branch is active (vectorized in t7)."""
    t7 = np.asarray(t7, dtype=float)
    A = t6 * t7
    b = t7 * t7 - t6 * t6
    s = t6 * t6 + t7 * t7
    r1, r2 = _np_roots(A, -b, -(1.0 + A), s * s + 4.0 * A)
    l1 = (t7 - 1.0 / t7) / t6
    h1 = (t7 + 1.0 / t7) / t6
    lo = np.maximum(l1, r1)
    hi = np.minimum(h1, r2)
    w = 2.0 * np.sqrt(A)
    disc = (s - w) * (s + w)
    e1, e2 = _np_roots(A, -b, 1.0 - A, disc)
    code = ((l1 >= r1).astype(int) + 2 * (h1 <= r2) + 4 * (hi > lo) + 8 * (disc > 0)
            + 16 * (e1 > lo) + 32 * (e2 < hi) + 64 * (e1 < hi) + 128 * (e2 > lo))
    return code


def g1_breaks(t6, t7_min=0.0, n=512, iters=52):
    """t7 in (t7_min, 1) where g1(., t6) switches branch (so may have a kink)."""
    lo_t = max(t7_min, 1e-12)
    if lo_t >= 1.0:
        return []
    t = np.unique(np.concatenate([np.geomspace(lo_t, 1.0, n), np.linspace(lo_t, 1.0, n)]))
    code = _g1_config(t, t6)
    idx = np.flatnonzero(code[1:] != code[:-1])
    if idx.size == 0:
        return []
    a, b, ca = t[idx], t[idx + 1], code[idx]
    for _ in range(iters):  # all switches bisected together
        m = 0.5 * (a + b)
        same = _g1_config(m, t6) == ca
        a = np.where(same, m, a)
        b = np.where(same, b, m)
    return (0.5 * (a + b)).tolist()


def g1_sampled(t7, t6, n=20_001, iters=60):
    """Estimate g1 from h alone; an independent check of the closed form.

    h is sampled on a grid, and every in/out switch between neighbours is
    located by bisection.  Components narrower than the grid step can be
    missed, so keep n large relative to (t7 + 1/t7)/t6.
    """
    if t6 > 1 or t7 > 1:
        return 0.0
    R = (t7 + 1.0 / t7) / t6 + 1.0
    u = np.linspace(-R, R, n)
    d = t7 - t6 * u
    hv = np.maximum(t7 * np.abs(d), np.abs(d * (t6 + t7 * u)))
    inside = hv <= 1.0
    switches = np.flatnonzero(inside[1:] != inside[:-1])
    length = 0.0
    start = None
    for i in switches:
        a, b = u[i], u[i + 1]
        a_in = bool(inside[i])
        for _ in range(iters):
            m = 0.5 * (a + b)
            if (h(m, t7, t6) <= 1.0) == a_in:
                a = m
            else:
                b = m
        edge = 0.5 * (a + b)
        if a_in:
            length += edge - (start if start is not None else u[0])
            start = None
        else:
            start = edge
    if start is not None:
        length += u[-1] - start
    return length


# ---------------------------------------------------------------------------
# integrals of g1; t = s^2 on both axes removes the (t6 t7)^(-1/2) edge

_ROUNDOFF_REL = 1e-7


def _quad(f, a, b, tol, rel=0.0, **kw):
    """scipy quad that only complains when the achieved error misses 10 * tol.

    QUADPACK raises its roundoff flag near the square-root kinks of g1 even
    when the reported error is comfortably below the request, and sometimes
    stops early on it; one retry with a 100x tighter request gets past that.
    Errors below _ROUNDOFF_REL * |value| are accepted whatever was asked:
    for very small t6 the inner integral is of size 1/t6 and an absolute
    target can sit under double precision.
    """
    def run(t):
        out = integrate.quad(f, a, b, epsabs=t, epsrel=rel, full_output=1, **kw)
        return out, out[1] > 10 * max(tol, rel * abs(out[0]), _ROUNDOFF_REL * abs(out[0]))

    out, bad = run(tol)
    if len(out) > 3 and bad:
        retry, still_bad = run(tol / 100)
        if retry[1] < out[1]:
            out, bad = retry, still_bad
    val, err = out[0], out[1]
    if len(out) > 3 and bad:
        warnings.warn(f"quadrature error {err:.2e} above tolerance {tol:.2e}: {out[3]}",
                      integrate.IntegrationWarning, stacklevel=3)
    return val, err


def _inner(t6, t7_min, tol):
    if t6 > 1 or t7_min >= 1:
        return 0.0, 0.0
    f = lambda s: 2.0 * s * g1(s * s, t6)
    a = math.sqrt(t7_min)
    pts = [math.sqrt(x) for x in g1_breaks(t6, t7_min) if a < math.sqrt(x) < 1.0]
    return _quad(f, a, 1.0, tol, limit=400, points=pts or None)


def in_V(eta, B):
    e1, e2, e3, e4, e5 = eta
    return e1 * e2**2 * e3**3 * e5**2 <= B and e1**3 * e2**2 * e3 * e4**2 <= B


def Y6(eta, B):
    e1, e2, e3, e4, e5 = eta
    return math.sqrt(B / (e1 * e2**2 * e3**3 * e5**2))


def Y7(eta, B):
    e1, e2, e3, e4, e5 = eta
    return math.sqrt(B / (e1**3 * e2**2 * e3 * e4**2))


def g2(t6, eta, B, tol=1e-10):
    if not in_V(eta, B):
        raise ValueError(f"eta={eta} is outside V for B={B}")
    return _inner(t6, 1.0 / Y7(eta, B), tol)[0]


def _double(t6_min, t7_min, tol):
    """(integral, error) of g1 over t6 >= t6_min, t7 >= t7_min."""
    inner_tol = tol / 10

    def outer(s6):
        # the inner error enters multiplied by 2 s6; near s6 = 0 the inner
        # integrand grows like 4/s6, so a fixed absolute target is unreachable
        return 2.0 * s6 * _inner(s6 * s6, t7_min, inner_tol / max(2.0 * s6, 1e-300))[0]

    return _quad(outer, math.sqrt(t6_min), 1.0, tol, limit=200)


def g3(eta, B, tol=1e-8):
    if not in_V(eta, B):
        raise ValueError(f"eta={eta} is outside V for B={B}")
    return _double(1.0 / Y6(eta, B), 1.0 / Y7(eta, B), tol)[0]


def cutoff_measure(Z6=None, Z7=None, tol=1e-9):
    """Measure of D_h with t6 < 1/Z6 (or t7 < 1/Z7)."""
    full = _double(0.0, 0.0, tol)[0]
    if Z6 is not None:
        return full - _double(min(1.0, 1.0 / Z6), 0.0, tol)[0]
    return full - _double(0.0, min(1.0, 1.0 / Z7), tol)[0]


@dataclass
class Estimate:
    value: float
    error: float
    meta: dict = field(default_factory=dict)


def omega_infty(tol=1e-8):
    """4 * integral of g1 over (0, 1]^2 by nested adaptive quadrature."""
    val, err = _double(0.0, 0.0, tol / 4)
    return Estimate(4.0 * val, 4.0 * (err + tol / 4), {"tol": tol, "method": "nested quad"})


# ---------------------------------------------------------------------------
# Monte Carlo in the original (x0, x2, x3) coordinates

def omega_infty_mc(n=10**7, seed=0, batch=10**6):
    """Importance-sampled estimate of 2 * iiint dx0 dx2 dx3 / (x0 x2).

    Writes x0 = exp(-a), x2 = exp(-c - a/2) (so x1 = x2^2/x0 = exp(-2c) <= 1 is
    automatic) and samples a ~ Exp(1/4), c ~ Exp(1/2).  The measure
    dx0 dx2 / (x0 x2) becomes da dc.  x3 is uniform on the real solutions of
    x3 (x3 + x0 + x1) <= x2, clipped to [-1, 1], and the remaining constraint
    x3 (x3 + x0 + x1) >= -x2 is tested pointwise.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n:
        k = min(batch, n - done)
        a = rng.exponential(4.0, k)
        c = rng.exponential(2.0, k)
        v = rng.random(k)
        x0 = np.exp(-a)
        x2 = np.exp(-c - 0.5 * a)
        s = x0 + x2 * x2 / x0
        sq = np.sqrt(s * s + 4.0 * x2)
        lo = np.maximum(-1.0, 0.5 * (-s - sq))
        hi = np.minimum(1.0, 0.5 * (-s + sq))
        width = np.maximum(hi - lo, 0.0)
        x3 = lo + v * width
        ok = x3 * (x3 + s) >= -x2
        dens = 0.25 * np.exp(-0.25 * a) * 0.5 * np.exp(-0.5 * c)
        w = np.where(ok, 2.0 * width / dens, 0.0)
        total += math.fsum(w.tolist())
        total_sq += math.fsum((w * w).tolist())
        done += k
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return Estimate(mean, math.sqrt(var / n), {"samples": n, "seed": seed,
                                               "rng": "Philox"})


# ---------------------------------------------------------------------------
# p-adic side

def omega_p(p):
    if not arithfun.is_prime(p):
        raise ValueError(f"{p} is not prime")
    return 1 + Fraction(6, p) + Fraction(1, p * p)


def euler_factor(p):
    return (1 - Fraction(1, p)) ** 6 * omega_p(p)


def euler_tail_bound(P_max):
    """Bound on |prod_{p > P_max} factor - 1| from |log factor| <= 20/p^2."""
    if P_max < 6:
        raise ValueError("tail bound is stated for P_max >= 6")
    s = TAIL_C / P_max  # sum_{n > P} 20/n^2 < 20/P
    return math.expm1(s)


def euler_product(P_max, dps=30):
    """Partial product over p <= P_max with an explicit tail bound."""
    if P_max < 2:
        raise ValueError("P_max must be >= 2")
    with mpmath.workdps(dps):
        log_sum = mpmath.mpf(0)
        for p in arithfun.primes_upto(P_max).tolist():
            x = mpmath.mpf(1) / p
            log_sum += 6 * mpmath.log1p(-x) + mpmath.log1p(6 * x + x * x)
        value = float(mpmath.exp(log_sum))
    tail = euler_tail_bound(max(P_max, 6))
    return Estimate(value, value * tail, {"P_max": P_max, "dps": dps})


def euler_product_exact(P_max):
    out = Fraction(1)
    for p in arithfun.primes_upto(P_max).tolist():
        out *= euler_factor(p)
    return out


def local_factor_identity(p):
    """Check the per-prime identity behind the Euler product of Theta * mu.

    Three exact comparisons: the grouped Theta sum against its closed form;
    the finite (Theta * mu) local sum against (1 - 1/p)^5 times it; and that
    (1 - 1/p)^5 times the Theta sum is the zeta(2) local factor times
    (1 - 1/p)^6 omega_p.
    """
    from itertools import product

    if not arithfun.is_prime(p):
        raise ValueError(f"{p} is not prime")
    q = Fraction(1, p)
    local = arithfun.theta_local_sum(p)
    closed = (1 / (1 - q * q)) * (1 - q) * omega_p(p)
    # (Theta * mu) vanishes off {0,1}^5, so its local series is a finite sum
    mu_sum = Fraction(0)
    for k in product((0, 1), repeat=5):
        mu_sum += arithfun.theta_mu_local(p, k) * q ** sum(k)
    zeta_local = 1 / (1 - q * q)
    return (local == closed
            and mu_sum == (1 - q) ** 5 * local
            and mu_sum == zeta_local * euler_factor(p))


# ---------------------------------------------------------------------------
# assembly

@dataclass
class PeyreBreakdown:
    alpha_tilde: Fraction
    beta: Fraction
    omega_infty: float
    omega_infty_err: float
    euler_product: float
    euler_product_err: float
    c: float
    c_err: float
    c_proof_side: float
    alpha_polytope: Fraction
    meta: dict = field(default_factory=dict)

    @property
    def assemblies_agree(self):
        return math.isclose(self.c, self.c_proof_side, rel_tol=1e-12)


def peyre_constant(P_max=10**5, quad_tol=1e-8):
    if P_max < 2 or quad_tol <= 0:
        raise ValueError("need P_max >= 2 and quad_tol > 0")
    om = omega_infty(quad_tol)
    ep = euler_product(P_max)
    c = float(ALPHA_TILDE * BETA) * om.value * ep.value
    c_err = float(ALPHA_TILDE) * (om.error * ep.value + om.value * ep.error
                                  + om.error * ep.error)
    alpha = polytope_alpha()
    zeta2 = math.pi ** 2 / 6
    # zeta(2)^-1 (omega/2) * alpha * zeta(2) prod(...)
    proof = (1 / zeta2) * (om.value / 2) * float(alpha) * (zeta2 * ep.value)
    return PeyreBreakdown(ALPHA_TILDE, BETA, om.value, om.error, ep.value, ep.error,
                          c, c_err, proof, alpha,
                          {"P_max": P_max, "quad_tol": quad_tol})
