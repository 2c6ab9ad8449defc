"""Functional relations on the rectangular-shape grid.

T[a][m] denotes the function attached to the a x m rectangle (a rows of
length m), computed from the tableau sum so that every relation verified
here cross-checks an independent code path from the determinant machinery
that motivates the relations.  The grid satisfies

  * a bilinear (discrete Hirota) relation with a vacuum factor g on the
    a = 1 line,
  * vanishing for a >= r+2 and m >= s+2,
  * reduction of long rows to the (s+1)-row boundary and of tall columns to
    the (r+1)-column boundary, tied together by a duality relation.

Bilinear residuals involve products of grid entries whose flat expansion
can be very large, so every relation also has a *_holds form evaluated
through the certified multipoint engine without expanding products.
"""

from __future__ import annotations

from gmpy2 import mpq

from . import certify
from .certify import ProductNode, SumNode, TermNode
from .diagrams import Partition, SkewShape
from .dvf import (BetheRootSet, RootSystemConfig, TableauSumNode, q_function,
                  t_skew, unit_normalizer)
from .qarith import TermSum, shift_u

__all__ = [
    "TGrid",
    "g_factor",
    "g_identity_residual",
    "hirota_residual",
    "hirota_holds",
    "vanishing_check",
    "red1_residual",
    "red2_residual",
    "duality_residual",
    "followup_residual",
    "laplace1_residual",
    "laplace2_residual",
    "laplace1_holds",
    "laplace2_holds",
    "followup_holds",
    "reduction_checks",
]


class TGrid:
    """Cache of rectangle functions T[a][m] for one preset and root set."""

    def __init__(self, cfg: RootSystemConfig, rs: BetheRootSet):
        self.cfg = cfg
        self.rs = rs
        self._sums: dict[tuple[int, int], TermSum] = {}
        self._nodes: dict[tuple[int, int], object] = {}

    def _shape(self, a: int, m: int) -> SkewShape:
        return SkewShape(Partition(()), Partition((m,) * a))

    def entry(self, a: int, m: int) -> TermSum:
        """T[a][m] as a flat TermSum; 1 on the a=0 and m=0 boundaries."""
        if a < 0 or m < 0:
            return TermSum.zero(self.rs.qp, exact=self.rs.exact)
        key = (a, m)
        val = self._sums.get(key)
        if val is None:
            val = t_skew(self.cfg, self._shape(a, m), self.rs)
            self._sums[key] = val
        return val

    def node(self, a: int, m: int):
        """Lazily evaluated form of the same entry for certified checks."""
        if a < 0 or m < 0:
            return TermNode(TermSum.zero(self.rs.qp))
        key = (a, m)
        val = self._nodes.get(key)
        if val is None:
            if a == 0 or m == 0:
                val = TermNode(TermSum.const(self.rs.qp, 1))
            else:
                val = TableauSumNode(self.cfg, self._shape(a, m), self.rs)
            self._nodes[key] = val
        return val

    def shifted_node(self, a: int, m: int, shift: int):
        return certify.ShiftNode(self.node(a, m), self.rs.qp, shift)


def g_factor(rs: BetheRootSet, a: int, m: int) -> TermSum:
    """Vacuum factor of the bilinear relation: nontrivial only for a = 1."""
    if a < 0 or m < 0:
        raise ValueError("grid indices must be non-negative")
    if a == 1 and m >= 1:
        out = TermSum.const(rs.qp, 1 if rs.exact else (1 + 0j),
                            exact=rs.exact)
        from .dvf import p_function
        for j in range(1, m + 1):
            out = out * p_function(rs, -m + 2 * j - 2)
        return out
    return TermSum.const(rs.qp, 1 if rs.exact else (1 + 0j), exact=rs.exact)


def g_identity_residual(rs: BetheRootSet, a: int, m: int) -> TermSum:
    """g(a,m)(u+1) g(a,m)(u-1) - g(a,m+1)(u) g(a,m-1)(u), expected zero."""
    if a < 1 or m < 1:
        raise ValueError("identity defined for a, m >= 1")
    lhs = shift_u(g_factor(rs, a, m), 1) * shift_u(g_factor(rs, a, m), -1)
    rhs = g_factor(rs, a, m + 1) * g_factor(rs, a, m - 1)
    return lhs - rhs


def hirota_residual(grid: TGrid, a: int, m: int) -> TermSum:
    """Expanded bilinear residual at cell (a, m); zero when the relation holds.

    T[a][m](u-1) T[a][m](u+1) - T[a][m+1](u) T[a][m-1](u)
      - g(a,m)(u) T[a-1][m](u) T[a+1][m](u)

    Expansion multiplies grid entries term by term; for large cells prefer
    hirota_holds, which never expands.
    """
    if a < 1 or m < 1:
        raise ValueError("bilinear relation defined for a, m >= 1")
    t = grid.entry
    lhs = shift_u(t(a, m), -1) * shift_u(t(a, m), 1)
    mid = t(a, m + 1) * t(a, m - 1)
    g = g_factor(grid.rs, a, m)
    rgt = g * t(a - 1, m) * t(a + 1, m)
    return lhs - mid - rgt


def hirota_holds(grid: TGrid, a: int, m: int) -> tuple[bool, dict]:
    """Certified check of the bilinear relation without expanding products."""
    if a < 1 or m < 1:
        raise ValueError("bilinear relation defined for a, m >= 1")
    lhs = ProductNode([grid.shifted_node(a, m, -1),
                       grid.shifted_node(a, m, 1)])
    mid = ProductNode([grid.node(a, m + 1), grid.node(a, m - 1)])
    g = TermNode(g_factor(grid.rs, a, m))
    rgt = ProductNode([g, grid.node(a - 1, m), grid.node(a + 1, m)])
    return certify.expr_is_zero(SumNode([lhs, mid, rgt], [1, -1, -1]))


def vanishing_check(grid: TGrid, a: int, m: int) -> bool:
    """Whether T[a][m] is the zero function."""
    entry = grid.entry(a, m)
    if entry.is_structurally_zero():
        return True
    from .qarith import is_zero
    return is_zero(entry)


def _q_ratio(rs: BetheRootSet, color: int, num_shift: int,
             den_shift: int) -> TermSum:
    num = q_function(rs, color, num_shift)
    den = q_function(rs, color, den_shift)
    return num * den.terms[0].inverse()


def red1_residual(grid: TGrid, m: int) -> TermSum:
    """Long-row reduction at full column height r+1, for m >= s+1."""
    cfg, rs = grid.cfg, grid.rs
    r, s = cfg.r, cfg.s
    if m < s + 1:
        raise ValueError(f"reduction needs m >= s+1 = {s + 1}")
    lhs = grid.entry(r + 1, m)
    rhs = shift_u(grid.entry(r + 1, s + 1), m - s - 1)
    rhs = rhs * unit_normalizer(rs, m - s, r - s + 2)
    rhs = rhs * _q_ratio(rs, r + 1, -m, m - 2 * s - 2)
    return lhs - rhs


def red2_residual(grid: TGrid, a: int) -> TermSum:
    """Tall-column reduction at full row width s+1, for a >= r+1."""
    cfg, rs = grid.cfg, grid.rs
    r, s = cfg.r, cfg.s
    if a < r + 1:
        raise ValueError(f"reduction needs a >= r+1 = {r + 1}")
    sign = -1 if ((s + 1) * (a - r - 1)) % 2 else 1
    lhs = grid.entry(a, s + 1)
    rhs = shift_u(grid.entry(r + 1, s + 1), a - r - 1) * sign
    rhs = rhs * _q_ratio(rs, r + 1, -a - s + r, a - s - r - 2)
    return lhs - rhs


def duality_residual(grid: TGrid, a: int) -> TermSum:
    """Row/column duality: T[r+1][a+s] against T[r+a][s+1], for a >= 1."""
    cfg, rs = grid.cfg, grid.rs
    r, s = cfg.r, cfg.s
    if a < 1:
        raise ValueError("duality defined for a >= 1")
    sign = -1 if ((s + 1) * (a - 1)) % 2 else 1
    lhs = grid.entry(r + 1, a + s)
    rhs = grid.entry(r + a, s + 1) * unit_normalizer(rs, a, r - s + 2) * sign
    return lhs - rhs


def _followup_inner(grid: TGrid) -> TermSum:
    # second factor of the corner relation; the g factor matters only for
    # r = 0, where the a = r+1 line carries a nontrivial vacuum factor
    cfg, rs = grid.cfg, grid.rs
    r, s = cfg.r, cfg.s
    correction = (grid.entry(r, s + 1)
                  * g_factor(rs, r + 1, s + 1)
                  * unit_normalizer(rs, 2, r - s + 2).inverse()
                  * (-1 if (s + 1) % 2 else 1))
    return grid.entry(r + 1, s) + correction


def followup_residual(grid: TGrid) -> TermSum:
    """Bilinear relation distinguished at the corner cell (r+1, s+1)."""
    r, s = grid.cfg.r, grid.cfg.s
    t = grid.entry
    lhs = shift_u(t(r + 1, s + 1), -1) * shift_u(t(r + 1, s + 1), 1)
    return lhs - t(r + 1, s + 2) * _followup_inner(grid)


def laplace1_residual(grid: TGrid, m: int) -> TermSum:
    """Degenerate bilinear relation along a = r+1, for m >= s+2."""
    r, s = grid.cfg.r, grid.cfg.s
    if m < s + 2:
        raise ValueError(f"degenerate relation needs m >= s+2 = {s + 2}")
    t = grid.entry
    return (shift_u(t(r + 1, m), -1) * shift_u(t(r + 1, m), 1)
            - t(r + 1, m + 1) * t(r + 1, m - 1))


def laplace2_residual(grid: TGrid, a: int) -> TermSum:
    """Degenerate bilinear relation along m = s+1, for a >= r+2."""
    r, s = grid.cfg.r, grid.cfg.s
    if a < r + 2:
        raise ValueError(f"degenerate relation needs a >= r+2 = {r + 2}")
    t = grid.entry
    g = g_factor(grid.rs, a, s + 1)
    return (shift_u(t(a, s + 1), -1) * shift_u(t(a, s + 1), 1)
            - g * t(a - 1, s + 1) * t(a + 1, s + 1))


def laplace1_holds(grid: TGrid, m: int) -> tuple[bool, dict]:
    r, s = grid.cfg.r, grid.cfg.s
    if m < s + 2:
        raise ValueError(f"degenerate relation needs m >= s+2 = {s + 2}")
    lhs = ProductNode([grid.shifted_node(r + 1, m, -1),
                       grid.shifted_node(r + 1, m, 1)])
    rhs = ProductNode([grid.node(r + 1, m + 1), grid.node(r + 1, m - 1)])
    return certify.expr_is_zero(SumNode([lhs, rhs], [1, -1]))


def laplace2_holds(grid: TGrid, a: int) -> tuple[bool, dict]:
    r, s = grid.cfg.r, grid.cfg.s
    if a < r + 2:
        raise ValueError(f"degenerate relation needs a >= r+2 = {r + 2}")
    lhs = ProductNode([grid.shifted_node(a, s + 1, -1),
                       grid.shifted_node(a, s + 1, 1)])
    g = TermNode(g_factor(grid.rs, a, s + 1))
    rhs = ProductNode([g, grid.node(a - 1, s + 1), grid.node(a + 1, s + 1)])
    return certify.expr_is_zero(SumNode([lhs, rhs], [1, -1]))


def followup_holds(grid: TGrid) -> tuple[bool, dict]:
    r, s = grid.cfg.r, grid.cfg.s
    lhs = ProductNode([grid.shifted_node(r + 1, s + 1, -1),
                       grid.shifted_node(r + 1, s + 1, 1)])
    rhs = ProductNode([grid.node(r + 1, s + 2),
                       TermNode(_followup_inner(grid))])
    return certify.expr_is_zero(SumNode([lhs, rhs], [1, -1]))


def reduction_checks(grid: TGrid, max_am: int = 4) -> list[dict]:
    """Run every reduction/duality/degenerate relation up to index max_am.

    Returns one record per relation instance with a certified verdict.
    Linear relations are decided on expanded residuals; bilinear ones go
    through the lazy engine to avoid expanding entry products.
    """
    from .qarith import is_zero
    cfg = grid.cfg
    r, s = cfg.r, cfg.s
    out = []

    def record(name, params, ok, info=None):
        out.append({"relation": name, "params": params, "ok": ok,
                    "info": info or {}})

    for m in range(s + 1, max_am + 1):
        record("red1", {"m": m}, is_zero(red1_residual(grid, m)))
    for a in range(r + 1, max_am + 1):
        record("red2", {"a": a}, is_zero(red2_residual(grid, a)))
    for a in range(1, max_am + 1):
        record("duality", {"a": a}, is_zero(duality_residual(grid, a)))
    ok, info = followup_holds(grid)
    record("followup", {}, ok, info)
    for m in range(s + 2, max_am + 1):
        ok, info = laplace1_holds(grid, m)
        record("laplace1", {"m": m}, ok, info)
    for a in range(r + 2, max_am + 1):
        ok, info = laplace2_holds(grid, a)
        record("laplace2", {"a": a}, ok, info)
    return out
