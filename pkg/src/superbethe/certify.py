"""Certified zero/equality tests for composite rational expressions.

Large identities (Jacobi-Trudi determinants against tableau sums, bilinear
functional relations between grid entries) cannot always be expanded into a
flat TermSum: the product of two thousand-term sums is out of reach while
its value at a point is cheap.  This module works with lazily evaluated
expression nodes instead.

Every node reports a degree profile (n, a, denoms) certifying that its
value is N(x) / (x^a * D(x)) with deg N <= n and D = prod (m^2 x^2 - 1)^d_m
over the recorded denominator atoms.  For a difference of two nodes the
cleared numerator is a polynomial with a computable degree bound, so
agreement at one more distinct non-pole point than that bound is a proof of
equality, not a heuristic.  All evaluation is exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .qarith import PoleAtEvaluationPoint, TermSum

__all__ = [
    "Profile",
    "TermNode",
    "ProductNode",
    "SumNode",
    "DetNode",
    "ShiftNode",
    "expr_is_zero",
    "expr_equal",
]


@dataclass(frozen=True)
class Profile:
    """Degree certificate: value = N(x)/(x^a * D(x)), deg N <= n."""

    n: int
    a: int
    denoms: tuple  # sorted tuple of (multiplier, exponent bound)

    def denom_dict(self) -> dict:
        return dict(self.denoms)


def _profile(n: int, a: int, denoms: dict) -> Profile:
    return Profile(n, a, tuple(sorted(denoms.items())))


def termsum_profile(f: TermSum) -> Profile:
    if not f.terms:
        return _profile(0, 0, {})
    d = f.denominator_atoms()
    a = max(0, f.max_total_degree())
    n = 2 * a + 2 * sum(d.values())
    return _profile(n, a, d)


def product_profile(ps) -> Profile:
    n = a = 0
    d: dict = {}
    for p in ps:
        n += p.n
        a += p.a
        for m, e in p.denoms:
            d[m] = d.get(m, 0) + e
    return _profile(n, a, d)


def sum_profile(ps) -> Profile:
    ps = list(ps)
    if not ps:
        return _profile(0, 0, {})
    d: dict = {}
    a = max(p.a for p in ps)
    for p in ps:
        for m, e in p.denoms:
            if e > d.get(m, 0):
                d[m] = e
    deg_d = 2 * sum(d.values())
    n = 0
    for p in ps:
        slack = deg_d - 2 * sum(e for _, e in p.denoms)
        n = max(n, p.n + (a - p.a) + slack)
    return _profile(n, a, d)


class TermNode:
    """Leaf wrapping a TermSum."""

    def __init__(self, f: TermSum):
        self.f = f

    def profile(self) -> Profile:
        return termsum_profile(self.f)

    def eval_at(self, x, cache):
        return self.f.eval_at(x, cache)


class ProductNode:
    def __init__(self, factors):
        self.factors = list(factors)

    def profile(self) -> Profile:
        return product_profile(f.profile() for f in self.factors)

    def eval_at(self, x, cache):
        v = mpq(1)
        for f in self.factors:
            v *= f.eval_at(x, cache)
            if v == 0:
                return v
        return v


class SumNode:
    """Linear combination sum(coeff_i * node_i)."""

    def __init__(self, parts, coeffs=None):
        self.parts = list(parts)
        self.coeffs = list(coeffs) if coeffs is not None else [1] * len(self.parts)

    def profile(self) -> Profile:
        return sum_profile(p.profile() for p in self.parts)

    def eval_at(self, x, cache):
        total = mpq(0)
        for c, p in zip(self.coeffs, self.parts):
            total += c * p.eval_at(x, cache)
        return total


class ShiftNode:
    """Spectral shift u -> u + s of an inner node: evaluate at q^s * x.

    The inner profile transports exactly: denominators keep their exponents
    with multipliers scaled by q^s, and polynomial degrees are unchanged.
    """

    def __init__(self, inner, qp, s: int):
        self.inner = inner
        self.qp = qp
        self.s = s

    def profile(self) -> Profile:
        p = self.inner.profile()
        qs = self.qp.pow(self.s)
        return Profile(p.n, p.a,
                       tuple(sorted((m * qs, e) for m, e in p.denoms)))

    def eval_at(self, x, cache):
        return self.inner.eval_at(x * self.qp.pow(self.s), cache)


class DetNode:
    """Determinant of a matrix of TermSums, evaluated by exact elimination."""

    def __init__(self, entries):
        self.entries = [list(row) for row in entries]
        self.size = len(self.entries)

    def profile(self) -> Profile:
        from itertools import permutations
        row_profiles = [[termsum_profile(e) for e in row]
                        for row in self.entries]
        sigma_profiles = []
        for perm in permutations(range(self.size)):
            sigma_profiles.append(product_profile(
                row_profiles[i][perm[i]] for i in range(self.size)))
        return sum_profile(sigma_profiles)

    def eval_at(self, x, cache):
        vals = [[e.eval_at(x, cache) for e in row] for row in self.entries]
        return _det_exact(vals)


def _det_exact(a) -> mpq:
    """Determinant by Gaussian elimination with column pivoting, exact field."""
    n = len(a)
    a = [row[:] for row in a]
    det = mpq(1)
    for col in range(n):
        pivot = None
        for row in range(col, n):
            if a[row][col] != 0:
                pivot = row
                break
        if pivot is None:
            return mpq(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        pv = a[col][col]
        det *= pv
        for row in range(col + 1, n):
            if a[row][col] != 0:
                factor = a[row][col] / pv
                arow, acol = a[row], a[col]
                for k in range(col + 1, n):
                    arow[k] -= factor * acol[k]
    return det


def expr_is_zero(expr, *, start: int = 2) -> tuple[bool, dict]:
    """Certified zero test; returns (verdict, witness info).

    Evaluates at successive integers, skipping poles, until one more point
    than the cleared-numerator degree bound has agreed; any nonzero value
    settles the question immediately.
    """
    prof = expr.profile()
    needed = prof.n + 1
    x = start
    seen = 0
    while seen < needed:
        cache: dict = {}
        try:
            v = expr.eval_at(mpq(x), cache)
        except PoleAtEvaluationPoint:
            x += 1
            continue
        if v != 0:
            return False, {"points": seen, "needed": needed,
                           "counterexample_x": x, "value": v}
        seen += 1
        x += 1
    return True, {"points": seen, "needed": needed}


def expr_equal(lhs, rhs) -> tuple[bool, dict]:
    """Certified equality of two expression nodes."""
    return expr_is_zero(SumNode([lhs, rhs], [1, -1]))
