"""Hot enumeration loops, in a numba flavour and a numpy flavour.

Both flavours compute the same integers.  Which one ``count_direct_half`` and
``count_torsor`` dispatch to is decided by :mod:`a3quartic._accel`.

All arithmetic is int64.  Every product formed below is bounded by a small
multiple of B**2 (inequalities are tested by division where a product could
exceed that), so results are exact for B <= ``INT64_SAFE_B``.
"""
import math
from functools import lru_cache

import numpy as np

from ._accel import INT64_SAFE_B, USE_NUMBA

if USE_NUMBA:
    from numba import njit, prange
else:  # pragma: no cover - exercised via A3Q_DISABLE_NUMBA=1
    prange = range

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


# ---------------------------------------------------------------------------
# scalar helpers (compiled when numba is on, plain python otherwise)

@njit(cache=True, nogil=True)
def _gcd(a, b):
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


@njit(cache=True, nogil=True)
def _isqrt(n):
    if n <= 0:
        return 0
    r = np.int64(math.sqrt(n))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


@njit(cache=True, nogil=True)
def _inv_mod(a, m):
    # m >= 1, gcd(a, m) == 1
    if m == 1:
        return 0
    a = a % m
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    return s0 % m


@njit(cache=True, nogil=True)
def _quad_roots(a, b, c):
    """Real roots (lo, hi) of a*x^2 + b*x + c with a > 0; nan pair if none."""
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return np.nan, np.nan
    sq = math.sqrt(disc)
    if b >= 0.0:
        q = -0.5 * (b + sq)
    else:
        q = -0.5 * (b - sq)
    if q == 0.0:
        return 0.0, 0.0
    r1 = q / a
    r2 = c / q
    if r1 <= r2:
        return r1, r2
    return r2, r1


# ---------------------------------------------------------------------------
# direct count: x0 = y a^2, x1 = y b^2, x2 = y a b, then scan x3

@njit(cache=True, nogil=True)
def _direct_row(B, y, a):
    # all b for fixed (y01, a); returns number of points with x2 > 0
    total = 0
    bmax = _isqrt(B // y)
    x0 = y * a * a
    for b in range(1, bmax + 1):
        if _gcd(a, b) != 1:
            continue
        x1 = y * b * b
        x2 = y * a * b
        s = x0 + x1
        K = B * x2
        # |x3 (x3 + s)| <= K is necessary for |x4| <= B
        sq = math.sqrt(float(s) * s + 4.0 * K)
        lo = max(-B, np.int64(math.floor((-s - sq) / 2.0)) - 1)
        hi = min(B, np.int64(math.ceil((-s + sq) / 2.0)) + 1)
        for x3 in range(lo, hi + 1):
            if x3 == 0:
                continue
            num = (s + x3) * x3
            if num % x2 != 0:
                continue
            x4 = num // x2
            if x4 > B or x4 < -B:
                continue
            if _gcd(_gcd(y, x3), x4) != 1:
                continue
            total += 1
    return total


@njit(cache=True, nogil=True, parallel=True)
def _direct_count_nb(B, rows):
    total = 0
    for i in prange(rows.shape[0]):
        total += _direct_row(B, rows[i, 0], rows[i, 1])
    return total


def _direct_rows(B):
    rows = []
    for y in range(1, B + 1):
        amax = math.isqrt(B // y)
        for a in range(1, amax + 1):
            rows.append((y, a))
    rows = np.array(rows, dtype=np.int64).reshape(-1, 2)
    # cheap rows cluster at large y; interleave so static chunks balance
    perm = np.random.Generator(np.random.Philox(12345)).permutation(len(rows))
    return rows[perm]


def _direct_count_np(B):
    total = 0
    for y in range(1, B + 1):
        amax = math.isqrt(B // y)
        if amax == 0:
            continue
        ar = np.arange(1, amax + 1, dtype=np.int64)
        for a in range(1, amax + 1):
            bs = ar[np.gcd(ar, a) == 1]
            for b in bs.tolist():
                x0, x1, x2 = y * a * a, y * b * b, y * a * b
                s = x0 + x1
                sq = math.sqrt(float(s) * s + 4.0 * B * x2)
                lo = max(-B, math.floor((-s - sq) / 2.0) - 1)
                hi = min(B, math.ceil((-s + sq) / 2.0) + 1)
                x3 = np.arange(lo, hi + 1, dtype=np.int64)
                x3 = x3[x3 != 0]
                num = (s + x3) * x3
                ok = num % x2 == 0
                x3, x4 = x3[ok], num[ok] // x2
                ok = np.abs(x4) <= B
                x3, x4 = x3[ok], x4[ok]
                g = np.gcd(np.gcd(x3, x4), y)
                total += int(np.count_nonzero(g == 1))
    return total


def count_direct_half(B):
    """Number of counted points with x0, x2 > 0 (half of N_{U,H}(B))."""
    if B > INT64_SAFE_B:
        raise OverflowError(f"B={B} exceeds the int64-safe range of the kernels")
    if USE_NUMBA:
        return int(_direct_count_nb(np.int64(B), _direct_rows(B)))
    return _direct_count_np(B)


# ---------------------------------------------------------------------------
# torsor count: outer (eta1..eta4), then eta5, eta6, eta7, and alpha2 in the
# residue class mod eta4*eta5 forced by the two torsor equations

def torsor_quads(B):
    """All (eta1, eta2, eta3, eta4) that admit some eta5 with Y6, Y7 >= 1."""
    out = []
    e1 = 1
    while e1 ** 3 <= B:
        e2 = 1
        while e1 ** 3 * e2 * e2 <= B and e1 * e2 * e2 <= B:
            e3 = 1
            while e1 ** 3 * e2 * e2 * e3 <= B and e1 * e2 * e2 * e3 ** 3 <= B:
                e4max = math.isqrt(B // (e1 ** 3 * e2 * e2 * e3))
                for e4 in range(1, e4max + 1):
                    if math.gcd(e2, e4) == 1 and math.gcd(e1 * e4, e3) == 1:
                        out.append((e1, e2, e3, e4))
                e3 += 1
            e2 += 1
        e1 += 1
    quads = np.array(out, dtype=np.int64).reshape(-1, 4)
    perm = np.random.Generator(np.random.Philox(54321)).permutation(len(quads))
    return quads[perm]


@njit(cache=True, nogil=True)
def _alpha2_pieces(B, e6, e7, P, Q, c3, K):
    """Float intervals (at most two) containing every admissible alpha2.

    c3 = B / (eta1 eta2 eta3 eta7) bounds |eta6 a2 - P|; K = B eta4 eta5 bounds
    |(eta6 a2 - P)(eta7 a2 + Q)|.
    """
    lo = (P - c3) / e6
    hi = (P + c3) / e6
    a = float(e6) * e7
    b = float(e6) * Q - float(e7) * P
    c = -float(P) * Q
    r1, r2 = _quad_roots(a, b, c - K)
    if r1 != r1:
        return 1.0, 0.0, 1.0, 0.0
    lo = max(lo, r1)
    hi = min(hi, r2)
    if lo > hi:
        return 1.0, 0.0, 1.0, 0.0
    s1, s2 = _quad_roots(a, b, c + K)
    if s1 != s1 or s2 - s1 <= 2.0:
        return lo, hi, 1.0, 0.0
    # drop (s1, s2), shrunk by one so rounding never loses a boundary point
    s1 += 1.0
    s2 -= 1.0
    if s2 <= lo or s1 >= hi:
        return lo, hi, 1.0, 0.0
    return lo, min(hi, s1), max(lo, s2), hi



@njit(cache=True, nogil=True)
def _quad_count(B, e1, e2, e3, e4):
    """#T(B) restricted to one outer (eta1, eta2, eta3, eta4)."""
    total = 0
    e123 = e1 * e2 * e3
    base5 = e1 * e2 * e2 * e3 * e3 * e3
    base7 = e1 * e1 * e1 * e2 * e2 * e3 * e4 * e4
    e5max = _isqrt(B // base5)
    e7max = _isqrt(B // base7)
    for e5 in range(1, e5max + 1):
        # gcd6, gcd7
        if _gcd(e2, e5) != 1 or _gcd(e1 * e4, e5) != 1:
            continue
        m = e4 * e5
        K = B * m
        inv5_4 = _inv_mod(e5, e4)
        Q0 = e2 * e3 * e3 * e5 * e5
        e6max = _isqrt(B // (base5 * e5 * e5))
        for e6 in range(1, e6max + 1):
            # gcd5
            if _gcd(e6, e1 * e2 * e4 * e5) != 1:
                continue
            Q = Q0 * e6
            inv6_5 = _inv_mod(e6, e5)
            g1m = e123 * e4 * e6
            for e7 in range(1, e7max + 1):
                # gcd4
                if _gcd(e7, e2 * e3 * e4 * e5 * e6) != 1:
                    continue
                P = e1 * e1 * e2 * e4 * e4 * e7
                # alpha2 = P / eta6 (mod eta5) and alpha2 = -Q / eta7 (mod eta4)
                u = (P % e5) * inv6_5 % e5
                v = ((e4 - Q % e4) % e4) * _inv_mod(e7, e4) % e4
                r = u + e5 * (((v - u) % e4) * inv5_4 % e4)
                c3int = B // (e123 * e7)
                g2m = e123 * e5 * e7
                g3m = e123 * e4 * e5
                lo1, hi1, lo2, hi2 = _alpha2_pieces(
                    B, e6, e7, P, Q, float(B) / (e123 * e7), float(K))
                stop1 = np.int64(0)
                for piece in range(2):
                    lo = lo1 if piece == 0 else lo2
                    hi = hi1 if piece == 0 else hi2
                    if lo > hi:
                        continue
                    start = np.int64(math.floor(lo)) - 1
                    stop = np.int64(math.ceil(hi)) + 1
                    if piece == 1 and lo1 <= hi1:
                        start = max(start, stop1 + 1)
                    else:
                        stop1 = stop
                    a2 = start + (r - start) % m
                    while a2 <= stop:
                        L = e6 * a2 - P  # eta5 * alpha1
                        if L != 0 and -c3int <= L <= c3int:
                            M = Q + e7 * a2  # eta4 * alpha4
                            al1 = L // e5
                            al4 = M // e4
                            aal1 = al1 if al1 > 0 else -al1
                            aal4 = al4 if al4 > 0 else -al4
                            if (aal4 == 0 or aal1 <= B // aal4) \
                                    and _gcd(al1, g1m) == 1 \
                                    and _gcd(al4, g2m) == 1 \
                                    and _gcd(a2, g3m) == 1:
                                total += 1
                        a2 += m
    return total


@njit(cache=True, nogil=True, parallel=True)
def _torsor_count_nb(B, quads):
    total = 0
    for i in prange(quads.shape[0]):
        total += _quad_count(B, quads[i, 0], quads[i, 1], quads[i, 2], quads[i, 3])
    return total


@lru_cache(maxsize=4096)
def _inv_table(m):
    tab = np.zeros(max(m, 1), dtype=np.int64)
    for r in range(1, m):
        if math.gcd(r, m) == 1:
            tab[r] = pow(r, -1, m)
    return tab


def _np_quad_roots(a, b, c):
    disc = b * b - 4.0 * a * c
    ok = disc >= 0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    q = np.where(b >= 0, -0.5 * (b + sq), -0.5 * (b - sq))
    qz = q == 0
    qs = np.where(qz, 1.0, q)
    r1 = np.where(qz, 0.0, q / a)
    r2 = np.where(qz, 0.0, c / qs)
    return ok, np.minimum(r1, r2), np.maximum(r1, r2)


def _np_progression(start, stop, r, m):
    """Flattened members of {r mod m} in each [start_i, stop_i]; owner index."""
    first = start + (r - start) % m
    n = np.maximum((stop - first) // m + 1, 0)
    owner = np.repeat(np.arange(len(n)), n)
    if owner.size == 0:
        return owner, owner
    offs = np.arange(owner.size) - np.repeat(np.cumsum(n) - n, n)
    return owner, first[owner] + offs * m


def _eta_count_np(B, e1, e2, e3, e4, e5):
    e123 = e1 * e2 * e3
    base5 = e1 * e2 * e2 * e3 ** 3
    e6max = math.isqrt(B // (base5 * e5 * e5))
    e7max = math.isqrt(B // (e1 ** 3 * e2 * e2 * e3 * e4 * e4))
    e6 = np.arange(1, e6max + 1, dtype=np.int64)
    e6 = e6[np.gcd(e6, e1 * e2 * e4 * e5) == 1]
    e7 = np.arange(1, e7max + 1, dtype=np.int64)
    E6 = np.repeat(e6, len(e7))
    E7 = np.tile(e7, len(e6))
    keep = np.gcd(E7, e2 * e3 * e4 * e5 * E6) == 1
    E6, E7 = E6[keep], E7[keep]
    if E6.size == 0:
        return 0
    m = e4 * e5
    K = B * m
    P = e1 * e1 * e2 * e4 * e4 * E7
    Q = e2 * e3 * e3 * e5 * e5 * E6
    u = (P % e5) * _inv_table(e5)[E6 % e5] % e5
    v = ((-Q) % e4) * _inv_table(e4)[E7 % e4] % e4
    r = u + e5 * (((v - u) % e4) * (pow(e5, -1, e4) if e4 > 1 else 0) % e4)
    c3 = B / (e123 * E7)
    lo = (P - c3) / E6
    hi = (P + c3) / E6
    qa = E6.astype(float) * E7
    qb = E6.astype(float) * Q - E7.astype(float) * P
    qc = -P.astype(float) * Q
    ok, r1, r2 = _np_quad_roots(qa, qb, qc - K)
    lo = np.maximum(lo, r1)
    hi = np.where(ok, np.minimum(hi, r2), lo - 1.0)
    ok2, s1, s2 = _np_quad_roots(qa, qb, qc + K)
    split = ok2 & (s2 - s1 > 2.0) & (s2 - 1.0 > lo) & (s1 + 1.0 < hi)
    hi1 = np.where(split, np.minimum(hi, s1 + 1.0), hi)
    lo2 = np.where(split, np.maximum(lo, s2 - 1.0), 1.0)
    hi2 = np.where(split, hi, 0.0)
    start1 = np.floor(lo).astype(np.int64) - 1
    stop1 = np.ceil(hi1).astype(np.int64) + 1
    stop1 = np.where(lo > hi1, start1 - 1, stop1)
    start2 = np.maximum(np.floor(lo2).astype(np.int64) - 1, stop1 + 1)
    stop2 = np.where(split, np.ceil(hi2).astype(np.int64) + 1, start2 - 1)

    total = 0
    for st, sp in ((start1, stop1), (start2, stop2)):
        own, a2 = _np_progression(st, sp, r, m)
        if a2.size == 0:
            continue
        f6, f7, fP, fQ = E6[own], E7[own], P[own], Q[own]
        L = f6 * a2 - fP
        c3int = B // (e123 * f7)
        sel = (L != 0) & (np.abs(L) <= c3int)
        a2, f6, f7, fQ, L = a2[sel], f6[sel], f7[sel], fQ[sel], L[sel]
        al1 = L // e5
        al4 = (fQ + f7 * a2) // e4
        aal4 = np.abs(al4)
        sel = (aal4 == 0) | (np.abs(al1) <= B // np.maximum(aal4, 1))
        sel &= np.gcd(al1, e123 * e4 * f6) == 1
        sel &= np.gcd(al4, e123 * e5 * f7) == 1
        sel &= np.gcd(a2, e123 * e4 * e5) == 1
        total += int(np.count_nonzero(sel))
    return total


def _torsor_count_np(B, quads):
    total = 0
    for e1, e2, e3, e4 in quads.tolist():
        e5max = math.isqrt(B // (e1 * e2 * e2 * e3 ** 3))
        for e5 in range(1, e5max + 1):
            if math.gcd(e2, e5) != 1 or math.gcd(e1 * e4, e5) != 1:
                continue
            total += _eta_count_np(B, e1, e2, e3, e4, e5)
    return total


def count_torsor(B):
    """#T(B) through the active backend."""
    if B > INT64_SAFE_B:
        raise OverflowError(f"B={B} exceeds the int64-safe range of the kernels")
    quads = torsor_quads(B)
    if USE_NUMBA:
        return int(_torsor_count_nb(np.int64(B), quads))
    return _torsor_count_np(B, quads)
