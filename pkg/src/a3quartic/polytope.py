"""Exact integration of polynomials over H-polytopes, by variable elimination.

To integrate out the last variable, the region is split into cells by which
lower and which upper bound is active.  Each cell is again an H-polytope in
one fewer variable, and the integrand is a polynomial whose antiderivative is
evaluated at two affine forms.  Everything stays in ``Fraction``.
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction

import numpy as np

# polynomial: {exponent tuple: Fraction}; constraint: (coeffs, rhs, strict),
# meaning coeffs . x <= rhs (or < rhs)


def _poly_add(acc, p, scale=1):
    for k, v in p.items():
        acc[k] += v * scale


def _affine_power(form, e, n):
    """(c0 + sum c_i x_i)^e as a polynomial in n variables; form = (c0, (c_1..c_n))."""
    c0, cs = form
    terms = [((0,) * n, c0)] + [
        (tuple(1 if j == i else 0 for j in range(n)), c) for i, c in enumerate(cs) if c]
    out = {(0,) * n: Fraction(1)}
    for _ in range(e):
        nxt = defaultdict(Fraction)
        for k1, v1 in out.items():
            for k2, v2 in terms:
                if v2:
                    nxt[tuple(a + b for a, b in zip(k1, k2))] += v1 * v2
        out = dict(nxt)
    return out


def _poly_mul(p, q):
    out = defaultdict(Fraction)
    for k1, v1 in p.items():
        for k2, v2 in q.items():
            out[tuple(a + b for a, b in zip(k1, k2))] += v1 * v2
    return out


def _integrate_last(poly, lower, upper, n):
    """Integrate poly (n+1 vars) in its last variable from lower to upper (affine in n vars)."""
    out = defaultdict(Fraction)
    # group by exponent of the last variable
    by_e = defaultdict(dict)
    for k, v in poly.items():
        by_e[k[-1]][k[:-1]] = v
    for e, coeff_poly in by_e.items():
        up = _affine_power(upper, e + 1, n)
        lo = _affine_power(lower, e + 1, n)
        diff = defaultdict(Fraction)
        _poly_add(diff, up)
        _poly_add(diff, lo, -1)
        _poly_add(out, _poly_mul(coeff_poly, diff), Fraction(1, e + 1))
    return {k: v for k, v in out.items() if v}


def _normalize(cons):
    """Drop exact duplicates (after scaling) so tie-breaking is well defined."""
    seen = {}
    for a, b, strict in cons:
        scale = next((abs(x) for x in list(a) + [b] if x), Fraction(1))
        key = (tuple(x / scale for x in a), b / scale)
        seen[key] = seen.get(key, False) or strict
    return [(a, b, s) for (a, b), s in seen.items()]


def integrate_polynomial(poly, constraints, n):
    """Exact integral of ``poly`` over {x in R^n : constraints}."""
    constraints = _normalize(constraints)
    if n == 0:
        ok = all((0 < b) if strict else (0 <= b) for _, b, strict in constraints)
        return poly.get((), Fraction(0)) if ok else Fraction(0)
    lowers, uppers, rest = [], [], []
    for a, b, strict in constraints:
        ak = a[-1]
        if ak == 0:
            rest.append((a[:-1], b, strict))
            continue
        # x_n <= (b - a'.x')/ak  (ak > 0)  or  x_n >= (b - a'.x')/ak  (ak < 0)
        form = (b / ak, tuple(-ai / ak for ai in a[:-1]))
        (uppers if ak > 0 else lowers).append(form)
    if not lowers or not uppers:
        raise ValueError("region is unbounded in the eliminated variable")
    total = Fraction(0)
    for i, L in enumerate(lowers):
        for j, U in enumerate(uppers):
            cell = list(rest)
            # L >= other lowers, U <= other uppers, L <= U; ties go to the lower index
            for l, L2 in enumerate(lowers):
                if l != i:
                    cell.append(_le(L2, L, strict=l < i))
            for u, U2 in enumerate(uppers):
                if u != j:
                    cell.append(_le(U, U2, strict=u < j))
            cell.append(_le(L, U, strict=False))
            reduced = _integrate_last(poly, L, U, n - 1)
            if reduced:
                total += integrate_polynomial(reduced, cell, n - 1)
    return total


def _le(f, g, strict):
    """Constraint f <= g for affine forms f = (c0, c)."""
    a = tuple(fi - gi for fi, gi in zip(f[1], g[1]))
    return (a, g[0] - f[0], strict)


def volume(A, b):
    """Exact volume of {x : A x <= b}."""
    A = [[Fraction(x) for x in row] for row in A]
    n = len(A[0])
    cons = [(tuple(row), Fraction(bi), False) for row, bi in zip(A, b)]
    return integrate_polynomial({(0,) * n: Fraction(1)}, cons, n)


# ---------------------------------------------------------------------------
# the polytope behind the log^5 coefficient

ROWS = ((1, 2, 3, 0, 2), (3, 2, 1, 2, 0))


def polytope5():
    """H-representation (A, b) of t >= 0, (1,2,3,0,2).t <= 1, (3,2,1,2,0).t <= 1."""
    A = [[-1 if j == i else 0 for j in range(5)] for i in range(5)]
    b = [0] * 5
    for row in ROWS:
        A.append(list(row))
        b.append(1)
    return A, b


def polytope_alpha():
    A, b = polytope5()
    return volume(A, b)


def bounding_box():
    """Per-axis upper bounds implied by the two rows (lower bounds are 0)."""
    return [min(Fraction(1, r[i]) for r in ROWS if r[i]) for i in range(5)]


def polytope_alpha_mc(n=10**7, seed=0, batch=10**6):
    """Hit-or-miss estimate; returns (estimate, standard error)."""
    rng = np.random.Generator(np.random.Philox(seed))
    box = np.array([float(x) for x in bounding_box()])
    box_vol = float(np.prod(box))
    rows = np.array(ROWS, dtype=float)
    hits = 0
    done = 0
    while done < n:
        k = min(batch, n - done)
        t = rng.random((k, 5)) * box
        hits += int(np.count_nonzero(np.all(t @ rows.T <= 1.0, axis=1)))
        done += k
    p = hits / n
    return p * box_vol, box_vol * np.sqrt(p * (1 - p) / n)
