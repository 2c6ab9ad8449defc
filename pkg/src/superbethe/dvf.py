"""Dressed-vacuum-form eigenvalue functions.

A root-system preset fixes the graded alphabet, the box-weight table (one
factored product of Q-ratios and a vacuum factor per label) and the Cartan
data.  Everything here is assembled from those boxes:

  * t_skew: the tableau sum over a skew shape, with its normalizer;
  * t_series: single-row / single-column functions from the ordered
    generating series in the shift operator X (X f(u) = f(u+2) X);
  * jacobi_trudi / jt_matrix: the determinant representations whose entries
    are single-row or single-column functions;
  * crossing, mixed-alphabet and split-convolution residuals used by the
    verification campaigns.

TableauSumNode evaluates the same tableau sum by a column-transfer dynamic
program so that huge shapes can be compared against determinants through
the certified multipoint engine without materializing every tableau term.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from gmpy2 import mpq

from . import certify
from .diagrams import Partition, SkewShape, conjugate
from .qarith import (FactoredTerm, QParameter, TermSum, as_rational,
                     draw_generic_rationals, reflect_u, shift_u)
from .tableaux import LabelSet, distinguished_labels, enumerate_tableaux, top_tableau

__all__ = [
    "UnknownLabel",
    "VanishingNormalizer",
    "MatrixTooLarge",
    "EqualRankError",
    "BoxSpec",
    "RootSystemConfig",
    "BetheRootSet",
    "preset",
    "draw_bethe_roots",
    "draw_float_roots",
    "q_function",
    "p_function",
    "z_function",
    "z_term",
    "unit_normalizer",
    "skew_normalizer",
    "t_skew",
    "TableauSumNode",
    "t_series",
    "jt_matrix",
    "jacobi_trudi",
    "jt_det_node",
    "top_term",
    "mixed_identity_residual",
    "crossing_residual",
    "ab_function",
    "convolution_residual",
]


class UnknownLabel(Exception):
    pass


class VanishingNormalizer(Exception):
    pass


class MatrixTooLarge(Exception):
    pass


class EqualRankError(Exception):
    pass


@dataclass(frozen=True)
class BoxSpec:
    """Weight of one boxed label: vacuum shift plus signed Q-ratios.

    q_factors entries are (color, shift, sign): sign +1 puts Q_color(u+shift)
    in the numerator, -1 in the denominator.  Colors 0 and ncolors+1 denote
    the constant function 1 and are skipped.
    """

    psi_shift: int
    q_factors: tuple[tuple[int, int, int], ...]


class RootSystemConfig:
    """A grading preset: alphabet, box table, Cartan pairing, signs."""

    def __init__(self, name: str, r: int, s: int, labels: LabelSet,
                 boxes: dict, cartan, degrees, t_signs, p_color: int):
        self.name = name
        self.r = r
        self.s = s
        self.labels = labels
        self.boxes = dict(boxes)
        self.cartan = tuple(tuple(int(v) for v in row) for row in cartan)
        self.degrees = tuple(int(d) for d in degrees)
        self.t_signs = tuple(int(t) for t in t_signs) if t_signs else None
        self.p_color = p_color
        self.ncolors = r + s + 1

    def box(self, label) -> BoxSpec:
        try:
            return self.boxes[label]
        except KeyError:
            raise UnknownLabel(f"label {label!r} not in preset {self.name}")

    def __repr__(self):
        return f"RootSystemConfig({self.name}, r={self.r}, s={self.s})"


def _distinguished_cartan(r: int, s: int):
    n = r + s + 1
    cart = [[0] * n for _ in range(n)]
    for a in range(1, n + 1):
        if a <= r:
            cart[a - 1][a - 1] = 2
        elif a == r + 1:
            cart[a - 1][a - 1] = 0
        else:
            cart[a - 1][a - 1] = -2
        if a < n:
            off = -1 if a <= r else 1
            cart[a - 1][a] = off
            cart[a][a - 1] = off
    return cart


def _covariant_boxes(r: int, s: int) -> dict:
    boxes = {}
    for a in range(1, r + 2):
        boxes[a] = BoxSpec(
            psi_shift=2 if a == 1 else 0,
            q_factors=((a - 1, a + 1, 1), (a, a - 2, 1),
                       (a - 1, a - 1, -1), (a, a, -1)))
    for a in range(r + 2, r + s + 3):
        base = 2 * r - a
        boxes[a] = BoxSpec(
            psi_shift=0,
            q_factors=((a - 1, base + 1, 1), (a, base + 4, 1),
                       (a - 1, base + 3, -1), (a, base + 2, -1)))
    return boxes


def _contravariant_boxes(r: int, s: int, quantum_space: str) -> dict:
    boxes = {}
    for a in range(-r - 1, 0):  # dotted even labels -1..-r-1
        base = r - s + a
        if quantum_space == "covariant":
            psi = r - s - 2 if a == -1 else r - s
        else:
            psi = 0
        boxes[a] = BoxSpec(
            psi_shift=psi,
            q_factors=((-a - 1, base - 1, 1), (-a, base + 2, 1),
                       (-a - 1, base + 1, -1), (-a, base, -1)))
    for a in range(-r - s - 2, -r - 1):  # dotted odd labels
        base = -r - s - a
        if quantum_space == "covariant":
            psi = r - s
        else:
            psi = -2 if a == -r - s - 2 else 0
        boxes[a] = BoxSpec(
            psi_shift=psi,
            q_factors=((-a - 1, base - 1, 1), (-a, base - 4, 1),
                       (-a - 1, base - 3, -1), (-a, base - 2, -1)))
    return boxes


def preset(name: str, r: int | None = None, s: int | None = None,
           quantum_space: str = "covariant") -> RootSystemConfig:
    """Named grading presets.

    distinguished-covariant / distinguished-contravariant take (r, s); the
    two sl(1|2) presets sl12-appC (parities 1,0,1) and sl12-appD (parities
    1,1,0) are fixed at r=0, s=1.  quantum_space selects which color the
    inhomogeneity factor attaches to for the contravariant preset.
    """
    if name == "distinguished-covariant":
        if r is None or s is None:
            raise ValueError("r and s required")
        labels = distinguished_labels(r, s)
        t = [1 if a <= r + 1 else -1 for a in range(1, r + s + 2)]
        deg = [1 if a == r + 1 else 0 for a in range(1, r + s + 2)]
        return RootSystemConfig(name, r, s, labels, _covariant_boxes(r, s),
                                _distinguished_cartan(r, s), deg, t, 1)
    if name == "distinguished-contravariant":
        if r is None or s is None:
            raise ValueError("r and s required")
        if quantum_space not in ("covariant", "contravariant"):
            raise ValueError("quantum_space must be covariant or contravariant")
        lab = tuple(range(-r - s - 2, 0))
        par = tuple(0 if a >= -(r + 1) else 1 for a in lab)
        labels = LabelSet(lab, par)
        t = [1 if a <= r + 1 else -1 for a in range(1, r + s + 2)]
        if quantum_space == "contravariant":
            t[r] = -1
        deg = [1 if a == r + 1 else 0 for a in range(1, r + s + 2)]
        p_color = 1 if quantum_space == "covariant" else r + s + 1
        return RootSystemConfig(name, r, s, labels,
                                _contravariant_boxes(r, s, quantum_space),
                                _distinguished_cartan(r, s), deg, t, p_color)
    if name == "sl12-appC":
        labels = LabelSet((1, 2, 3), (1, 0, 1))
        boxes = {
            1: BoxSpec(-2, ((1, 1, 1), (1, -1, -1))),
            2: BoxSpec(0, ((1, 1, 1), (2, -2, 1), (1, -1, -1), (2, 0, -1))),
            3: BoxSpec(0, ((2, -2, 1), (2, 0, -1))),
        }
        return RootSystemConfig(name, 0, 1, labels, boxes,
                                ((0, -1), (-1, 0)), (1, 1), None, 1)
    if name == "sl12-appD":
        labels = LabelSet((1, 2, 3), (1, 1, 0))
        boxes = {
            1: BoxSpec(-2, ((1, 1, 1), (1, -1, -1))),
            2: BoxSpec(0, ((1, -3, 1), (2, 0, 1), (1, -1, -1), (2, -2, -1))),
            3: BoxSpec(0, ((2, 0, 1), (2, -2, -1))),
        }
        return RootSystemConfig(name, 0, 1, labels, boxes,
                                ((-2, 1), (1, 0)), (0, 1), None, 1)
    raise ValueError(f"unknown preset {name!r}")


# ---------------------------------------------------------------------------
# Bethe data
# ---------------------------------------------------------------------------

class BetheRootSet:
    """Bethe roots and inhomogeneities stored as y = q^u values.

    roots[c] lists the color-(c+1) parameters, c = 0..ncolors-1; w lists the
    site inhomogeneities.  Exact rational values certify identities; complex
    values carry solved roots.
    """

    __slots__ = ("qp", "roots", "w", "exact")

    def __init__(self, qp: QParameter, roots, w=(), *, exact=None):
        self.qp = qp
        if exact is None:
            probe = [y for color in roots for y in color] + list(w)
            exact = not any(isinstance(y, complex) for y in probe)
        if exact:
            self.roots = tuple(tuple(as_rational(y) for y in color)
                               for color in roots)
            self.w = tuple(as_rational(y) for y in w)
        else:
            self.roots = tuple(tuple(complex(y) for y in color)
                               for color in roots)
            self.w = tuple(complex(y) for y in w)
        self.exact = exact
        if any(y == 0 for color in self.roots for y in color) or \
                any(y == 0 for y in self.w):
            raise ValueError("parameters q^u cannot vanish")

    @property
    def ncolors(self) -> int:
        return len(self.roots)

    @property
    def n_sites(self) -> int:
        return len(self.w)

    def counts(self) -> tuple[int, ...]:
        return tuple(len(color) for color in self.roots)

    def root(self, color: int, k: int):
        """1-based color and root index."""
        return self.roots[color - 1][k - 1]

    def to_float(self) -> "BetheRootSet":
        if not self.exact:
            return self
        return BetheRootSet(
            self.qp,
            [[complex(float(y)) for y in color] for color in self.roots],
            [complex(float(y)) for y in self.w], exact=False)

    def negated(self) -> "BetheRootSet":
        """All parameters u -> -u, i.e. y -> 1/y."""
        return BetheRootSet(self.qp,
                            [[1 / y for y in color] for color in self.roots],
                            [1 / y for y in self.w], exact=self.exact)

    def with_root(self, color: int, k: int, y) -> "BetheRootSet":
        roots = [list(c) for c in self.roots]
        roots[color - 1][k - 1] = y
        return BetheRootSet(self.qp, roots, self.w, exact=self.exact)

    def __repr__(self):
        return (f"BetheRootSet(counts={self.counts()}, "
                f"N={self.n_sites}, exact={self.exact})")


def draw_bethe_roots(qp: QParameter, ncolors: int, counts, n_sites: int,
                     seed: int) -> BetheRootSet:
    """Generic exact parameter draw (distinct prime-supported rationals)."""
    counts = list(counts)
    if len(counts) != ncolors:
        raise ValueError("one root count per color required")
    vals = draw_generic_rationals(sum(counts) + n_sites, seed)
    roots = []
    pos = 0
    for c in counts:
        roots.append(vals[pos:pos + c])
        pos += c
    return BetheRootSet(qp, roots, vals[pos:pos + n_sites])


def draw_float_roots(qp: QParameter, ncolors: int, counts, n_sites: int,
                     seed: int) -> BetheRootSet:
    """Generic complex draw on an annulus around |y| = 1."""
    import cmath
    import random
    rng = random.Random(seed)
    def draw():
        return ((0.6 + 0.9 * rng.random())
                * cmath.exp(2j * cmath.pi * rng.random()))
    roots = [[draw() for _ in range(c)] for c in counts]
    w = [draw() for _ in range(n_sites)]
    return BetheRootSet(qp, roots, w, exact=False)


# ---------------------------------------------------------------------------
# Boxes and normalizers
# ---------------------------------------------------------------------------

def _pow(rs: BetheRootSet, shift: int):
    return rs.qp.pow(shift) if rs.exact else float(rs.qp.pow(shift))


def _q_atoms(rs: BetheRootSet, color: int, shift: int, sign: int):
    """Atoms of Q_color(u + shift)^sign; colors 0 and ncolors+1 are 1."""
    if color == 0 or color == rs.ncolors + 1:
        return []
    qs = _pow(rs, shift)
    return [(qs / y, sign) for y in rs.roots[color - 1]]


def _p_atoms(rs: BetheRootSet, shift: int, sign: int = 1):
    qs = _pow(rs, shift)
    return [(qs / y, sign) for y in rs.w]


def q_function(rs: BetheRootSet, color: int, shift: int = 0) -> TermSum:
    """Q_color(u + shift) as a factored product of brackets."""
    if not 0 <= color <= rs.ncolors + 1:
        raise ValueError(f"color {color} out of range")
    one = 1 if rs.exact else (1 + 0j)
    return TermSum.from_term(
        rs.qp, FactoredTerm(one, _q_atoms(rs, color, shift, 1),
                            exact=rs.exact))


def p_function(rs: BetheRootSet, shift: int = 0) -> TermSum:
    """The vacuum product over sites, prod_j [u + shift - w_j]."""
    one = 1 if rs.exact else (1 + 0j)
    return TermSum.from_term(
        rs.qp, FactoredTerm(one, _p_atoms(rs, shift), exact=rs.exact))


def z_term(cfg: RootSystemConfig, label, rs: BetheRootSet,
           extra_shift: int = 0) -> FactoredTerm:
    """Box weight of one label at spectral argument u + extra_shift."""
    spec = cfg.box(label)
    atoms = _p_atoms(rs, spec.psi_shift + extra_shift)
    for color, shift, sgn in spec.q_factors:
        atoms.extend(_q_atoms(rs, color, shift + extra_shift, sgn))
    coeff = 1 if rs.exact else (1 + 0j)
    return FactoredTerm(coeff, atoms, exact=rs.exact)


def z_function(cfg: RootSystemConfig, label, rs: BetheRootSet,
               extra_shift: int = 0) -> TermSum:
    return TermSum.from_term(rs.qp, z_term(cfg, label, rs, extra_shift))


def unit_normalizer(rs: BetheRootSet, a: int, shift: int) -> FactoredTerm:
    """Single-column normalizer of height a, at argument u + shift.

    Height a >= 2 multiplies a-1 vacuum products, height 1 is trivial, and
    height 0 is the reciprocal of one vacuum product.  Negative heights
    denote the zero function and are rejected.
    """
    if a < 0:
        raise VanishingNormalizer(f"normalizer of negative height {a}")
    one = 1 if rs.exact else (1 + 0j)
    if a == 0:
        return FactoredTerm(one, _p_atoms(rs, shift - 1, -1), exact=rs.exact)
    atoms = []
    for j in range(1, a):
        atoms.extend(_p_atoms(rs, shift - 2 * j + a - 1))
    return FactoredTerm(one, atoms, exact=rs.exact)


def skew_normalizer(cfg: RootSystemConfig, shape: SkewShape,
                    rs: BetheRootSet) -> FactoredTerm:
    """Product of single-column normalizers across the columns of the shape."""
    lamc = conjugate(shape.inner)
    muc = conjugate(shape.outer)
    mu1 = shape.outer.width()
    mu1c = muc.part(1)
    one = 1 if rs.exact else (1 + 0j)
    atoms: list = []
    coeff = one
    for j in range(1, mu1 + 1):
        height = muc.part(j) - lamc.part(j)
        if height < 0:
            raise VanishingNormalizer(f"column {j} has negative height")
        shift = mu1c - mu1 - muc.part(j) - lamc.part(j) + 2 * j - 1
        t = unit_normalizer(rs, height, shift)
        coeff *= t.coeff
        atoms.extend(t.atoms)
    return FactoredTerm(coeff, atoms, exact=rs.exact)


# ---------------------------------------------------------------------------
# Tableau sum
# ---------------------------------------------------------------------------

def _cell_shift(shape: SkewShape, i: int, j: int) -> int:
    muc = conjugate(shape.outer)
    return muc.part(1) - shape.outer.width() - 2 * i + 2 * j


def t_skew(cfg: RootSystemConfig, shape: SkewShape, rs: BetheRootSet) -> TermSum:
    """Tableau sum over the skew shape, divided by its normalizer.

    The empty shape gives 1; a shape with no admissible filling gives the
    zero function.
    """
    if shape.is_empty():
        return TermSum.const(rs.qp, 1 if rs.exact else (1 + 0j),
                             exact=rs.exact)
    base = conjugate(shape.outer).part(1) - shape.outer.width()
    f_inv = skew_normalizer(cfg, shape, rs).inverse()
    zcache: dict = {}
    parities = {lab: cfg.labels.parity(lab) for lab in cfg.labels.labels}
    terms = []
    for tab in enumerate_tableaux(shape, cfg.labels):
        coeff = 1 if rs.exact else (1 + 0j)
        atoms = list(f_inv.atoms)
        sign = 0
        for i, j, label in tab.entries:
            key = (label, base - 2 * i + 2 * j)
            zt = zcache.get(key)
            if zt is None:
                zt = z_term(cfg, label, rs, key[1])
                zcache[key] = zt
            atoms.extend(zt.atoms)
            sign += parities[label]
        coeff = coeff * f_inv.coeff
        if sign % 2:
            coeff = -coeff
        terms.append(FactoredTerm(coeff, atoms, exact=rs.exact))
    return TermSum(rs.qp, terms, exact=rs.exact)


class TableauSumNode:
    """Column-transfer evaluation of the tableau sum for the certified engine.

    Column fillings are enumerated once; adjacent-column compatibility and
    per-filling factored weights are precomputed, so evaluation at a point is
    a small dynamic program summing exactly over the admissible tableaux.
    """

    def __init__(self, cfg: RootSystemConfig, shape: SkewShape,
                 rs: BetheRootSet):
        if not rs.exact:
            raise ValueError("certified evaluation requires exact parameters")
        self.qp = rs.qp
        self.shape = shape
        self.empty = shape.is_empty()
        if self.empty:
            return
        labels = cfg.labels
        parities = labels.parities
        n_labels = len(labels.labels)
        base = conjugate(shape.outer).part(1) - shape.outer.width()
        width = shape.outer.width()
        self.f_inv = skew_normalizer(cfg, shape, rs).inverse()
        self.tops = []      # first occupied row of each column
        self.heights = []
        self.fillings = []  # per column: list of label-index tuples
        self.weights = []   # per column: matching FactoredTerms
        for j in range(1, width + 1):
            top, bottom = shape.column_rows(j)
            height = max(0, bottom - top + 1)
            fillings: list[tuple[int, ...]] = []

            def grow(seq):
                if len(seq) == height:
                    fillings.append(tuple(seq))
                    return
                for idx in range(n_labels):
                    if seq:
                        ui = seq[-1]
                        if idx < ui or (idx == ui and parities[ui] == 0):
                            continue
                    seq.append(idx)
                    grow(seq)
                    seq.pop()

            if height > 0:
                grow([])
            else:
                fillings.append(())
            wts = []
            for f in fillings:
                atoms = []
                sign = 0
                for offset, idx in enumerate(f):
                    i = top + offset
                    lab = labels.labels[idx]
                    zt = z_term(cfg, lab, rs, base - 2 * i + 2 * j)
                    atoms.extend(zt.atoms)
                    sign += parities[idx]
                coeff = mpq(-1) if sign % 2 else mpq(1)
                wts.append(FactoredTerm(coeff, atoms, exact=True))
            self.tops.append(top)
            self.heights.append(height)
            self.fillings.append(fillings)
            self.weights.append(wts)
        # adjacent-column compatibility: weak along rows, strict for odd pairs
        self.compat = []
        for j in range(width - 1):
            top_a, h_a = self.tops[j], self.heights[j]
            top_b, h_b = self.tops[j + 1], self.heights[j + 1]
            lo = max(top_a, top_b)
            hi = min(top_a + h_a, top_b + h_b) - 1
            rows = [(i - top_a, i - top_b) for i in range(lo, hi + 1)]
            mat = []
            for left in self.fillings[j]:
                row_ok = []
                for right in self.fillings[j + 1]:
                    ok = True
                    for pa, pb in rows:
                        li, ri = left[pa], right[pb]
                        if ri < li or (ri == li and parities[li] == 1):
                            ok = False
                            break
                    row_ok.append(ok)
                mat.append(row_ok)
            self.compat.append(mat)

    def profile(self) -> certify.Profile:
        if self.empty:
            return certify.Profile(0, 0, ())
        denoms: dict = {}
        max_l = 0
        for wts in self.weights:
            col_d: dict = {}
            col_l = None
            for t in wts:
                lt = 0
                seen: dict = {}
                for m, e in t.atoms:
                    lt += e
                    if e < 0:
                        seen[m] = max(seen.get(m, 0), -e)
                for m, e in seen.items():
                    col_d[m] = max(col_d.get(m, 0), e)
                col_l = lt if col_l is None else max(col_l, lt)
            max_l += col_l or 0
            for m, e in col_d.items():
                denoms[m] = denoms.get(m, 0) + e
        for m, e in self.f_inv.atoms:
            max_l += e
            if e < 0:
                denoms[m] = denoms.get(m, 0) - e
        a = max(0, max_l)
        n = 2 * a + 2 * sum(denoms.values())
        return certify.Profile(n, a, tuple(sorted(denoms.items())))

    def eval_at(self, x, cache):
        if self.empty:
            return mpq(1)
        delta = self.qp.delta
        vec = None
        for j, wts in enumerate(self.weights):
            wvals = [t.eval_at(x, delta, cache) for t in wts]
            if vec is None:
                vec = wvals
                continue
            mat = self.compat[j - 1]
            nxt = []
            for g, wv in enumerate(wvals):
                acc = mpq(0)
                for f, pv in enumerate(vec):
                    if pv != 0 and mat[f][g]:
                        acc += pv
                nxt.append(wv * acc)
            vec = nxt
        total = sum(vec, mpq(0))
        return total * self.f_inv.eval_at(x, delta, cache)


# ---------------------------------------------------------------------------
# Generating series
# ---------------------------------------------------------------------------

def _check_block_order(cfg: RootSystemConfig):
    n = len(cfg.labels.labels)
    expect = tuple(0 if k <= cfg.r else 1 for k in range(n))
    if cfg.labels.parities != expect:
        raise ValueError(
            "generating series require the even-then-odd distinguished order")


def _series_one(qp: QParameter, order: int) -> list[TermSum]:
    out = [TermSum.zero(qp) for _ in range(order + 1)]
    out[0] = TermSum.const(qp, 1)
    return out


def _series_mul(qp, left: list[TermSum], right: list[TermSum]) -> list[TermSum]:
    order = len(left) - 1
    out = []
    for k in range(order + 1):
        acc = TermSum.zero(qp)
        for i in range(k + 1):
            if left[i].is_structurally_zero() or \
                    right[k - i].is_structurally_zero():
                continue
            acc = acc + left[i] * shift_u(right[k - i], 2 * i)
        out.append(acc)
    return out


def _factor_series(cfg, rs, label, kind: str, inner_sign: int,
                   order: int) -> list[TermSum]:
    """Series of (1 + inner_sign * z(label; u) X)^{+-1} up to X^order."""
    qp = rs.qp
    out = [TermSum.const(qp, 1)]
    if kind == "plain":
        z = z_function(cfg, label, rs) * inner_sign
        out.append(z)
        out.extend(TermSum.zero(qp) for _ in range(order - 1))
        return out[:order + 1]
    # inverse: coefficients (-inner_sign)^k z(u) z(u+2) ... z(u+2(k-1))
    prod = TermSum.const(qp, 1)
    for k in range(1, order + 1):
        prod = prod * z_function(cfg, label, rs, 2 * (k - 1))
        out.append(prod * ((-inner_sign) ** k))
    return out


def _series_coefficients(cfg, rs, factors, order: int) -> list[TermSum]:
    qp = rs.qp
    series = _series_one(qp, order)
    for label, kind, inner_sign in factors:
        series = _series_mul(qp, series,
                             _factor_series(cfg, rs, label, kind,
                                            inner_sign, order))
    return series


def _column_factors(cfg):
    plus = list(range(1, cfg.r + 2))
    minus = list(range(cfg.r + 2, cfg.r + cfg.s + 3))
    return ([(a, "inverse", 1) for a in reversed(minus)]
            + [(a, "plain", 1) for a in reversed(plus)])


def _row_factors(cfg):
    plus = list(range(1, cfg.r + 2))
    minus = list(range(cfg.r + 2, cfg.r + cfg.s + 3))
    return ([(a, "inverse", -1) for a in plus]
            + [(a, "plain", -1) for a in minus])


def t_series(cfg: RootSystemConfig, rs: BetheRootSet, kind: str,
             n: int) -> TermSum:
    """Single-column (kind='column', height n) or single-row (kind='row',
    length n) function, extracted from the ordered generating series.

    Negative n gives the zero function; n = 0 gives the vacuum product at
    u-1 for columns and 1 for rows.
    """
    if kind not in ("column", "row"):
        raise ValueError("kind must be 'column' or 'row'")
    _check_block_order(cfg)
    if n < 0:
        return TermSum.zero(rs.qp, exact=rs.exact)
    factors = _column_factors(cfg) if kind == "column" else _row_factors(cfg)
    coeff = _series_coefficients(cfg, rs, factors, n)[n]
    func = shift_u(coeff, 1 - n)
    if kind == "column":
        func = func * unit_normalizer(rs, n, 0).inverse()
    return func


def ab_function(cfg: RootSystemConfig, rs: BetheRootSet, which: str,
                n: int) -> TermSum:
    """Split-alphabet series: the even block alone or the odd block alone.

    which is one of 'A_row' (inverse even factors, ascending), 'B_col'
    (plain odd factors, ascending), 'B_row' (inverse odd factors,
    descending), 'A_col' (plain even factors, descending); n indexes the
    X^n coefficient, normalized to a function of u.
    """
    _check_block_order(cfg)
    if rs.n_sites != 0:
        raise ValueError("split convolutions assume a trivial vacuum")
    if n < 0:
        return TermSum.zero(rs.qp)
    plus = list(range(1, cfg.r + 2))
    minus = list(range(cfg.r + 2, cfg.r + cfg.s + 3))
    table = {
        "A_row": [(a, "inverse", -1) for a in plus],
        "B_col": [(a, "plain", -1) for a in minus],
        "B_row": [(a, "inverse", 1) for a in reversed(minus)],
        "A_col": [(a, "plain", 1) for a in reversed(plus)],
    }
    if which not in table:
        raise ValueError(f"unknown series {which!r}")
    coeff = _series_coefficients(cfg, rs, table[which], n)[n]
    return shift_u(coeff, 1 - n)


def convolution_residual(cfg: RootSystemConfig, rs: BetheRootSet, kind: str,
                         n: int) -> TermSum:
    """Difference between the split convolution and the full series.

    Columns: T^a(u) = sum_l B_{a-l}(u-l) A^l(u+a-l), l <= min(r+1, a).
    Rows:    T_m(u) = sum_l A_{m-l}(u-l) B^l(u+m-l), l <= min(s+1, m).
    """
    if rs.n_sites != 0:
        raise ValueError("split convolutions assume a trivial vacuum")
    qp = rs.qp
    acc = TermSum.zero(qp)
    if kind == "column":
        for l in range(0, min(cfg.r + 1, n) + 1):
            b = ab_function(cfg, rs, "B_row", n - l)
            a = ab_function(cfg, rs, "A_col", l)
            acc = acc + shift_u(b, -l) * shift_u(a, n - l)
    elif kind == "row":
        for l in range(0, min(cfg.s + 1, n) + 1):
            a = ab_function(cfg, rs, "A_row", n - l)
            b = ab_function(cfg, rs, "B_col", l)
            acc = acc + shift_u(a, -l) * shift_u(b, n - l)
    else:
        raise ValueError("kind must be 'column' or 'row'")
    return acc - t_series(cfg, rs, kind, n)


# ---------------------------------------------------------------------------
# Determinant representations
# ---------------------------------------------------------------------------

def jt_matrix(cfg: RootSystemConfig, shape: SkewShape, rs: BetheRootSet,
              axis: str) -> list[list[TermSum]]:
    """Matrix of shifted single-column / single-row functions whose
    determinant reproduces the tableau sum."""
    lam, mu = shape.inner, shape.outer
    lamc, muc = conjugate(lam), conjugate(mu)
    mu1 = mu.width()
    mu1c = muc.part(1)
    cache: dict = {}

    def entry(kind, order, shift):
        base = cache.get((kind, order))
        if base is None:
            base = t_series(cfg, rs, kind, order)
            cache[(kind, order)] = base
        return shift_u(base, shift)

    rows = []
    if axis == "column":
        for i in range(1, mu1 + 1):
            row = []
            for j in range(1, mu1 + 1):
                order = muc.part(i) - lamc.part(j) - i + j
                shift = -mu1 + mu1c - muc.part(i) - lamc.part(j) + i + j - 1
                row.append(entry("column", order, shift))
            rows.append(row)
    elif axis == "row":
        for i in range(1, mu1c + 1):
            row = []
            for j in range(1, mu1c + 1):
                order = mu.part(j) - lam.part(i) + i - j
                shift = -mu1 + mu1c + mu.part(j) + lam.part(i) - i - j + 1
                row.append(entry("row", order, shift))
            rows.append(row)
    else:
        raise ValueError("axis must be 'column' or 'row'")
    return rows


def jacobi_trudi(cfg: RootSystemConfig, shape: SkewShape, rs: BetheRootSet,
                 axis: str) -> TermSum:
    """Determinant form of the tableau sum, expanded to a flat TermSum.

    Column-axis entries carry their single-column normalizers, and those
    compose to the full skew normalizer, so the determinant is already the
    normalized function.  Row-axis entries are normalizer-free, so that
    determinant reproduces the bare tableau sum and is divided by the skew
    normalizer here (the two axes then agree; with a trivial vacuum the
    division is by 1).  Sizes beyond 7 are rejected; for large shapes
    prefer jt_det_node with the certified comparison engine, which never
    expands the products.
    """
    matrix = jt_matrix(cfg, shape, rs, axis)
    size = len(matrix)
    if size > 7:
        raise MatrixTooLarge(f"determinant size {size} exceeds 7")
    if size == 0:
        return TermSum.const(rs.qp, 1 if rs.exact else (1 + 0j),
                             exact=rs.exact)
    total = TermSum.zero(rs.qp, exact=rs.exact)
    for perm in itertools.permutations(range(size)):
        sign = _perm_sign(perm)
        prod = matrix[0][perm[0]]
        for i in range(1, size):
            if prod.is_structurally_zero():
                break
            prod = prod * matrix[i][perm[i]]
        total = total + prod * sign
    if axis == "row":
        total = total * skew_normalizer(cfg, shape, rs).inverse()
    return total


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def jt_det_node(cfg: RootSystemConfig, shape: SkewShape, rs: BetheRootSet,
                axis: str):
    """Lazily evaluated determinant node (normalized like jacobi_trudi)."""
    matrix = jt_matrix(cfg, shape, rs, axis)
    if not matrix:
        return certify.TermNode(TermSum.const(rs.qp, 1))
    det = certify.DetNode(matrix)
    if axis == "row":
        f_inv = TermSum.from_term(rs.qp,
                                  skew_normalizer(cfg, shape, rs).inverse())
        return certify.ProductNode([det, certify.TermNode(f_inv)])
    return det


# ---------------------------------------------------------------------------
# Top term
# ---------------------------------------------------------------------------

def top_term(cfg: RootSystemConfig, shape: SkewShape,
             rs: BetheRootSet) -> FactoredTerm:
    """Signed weight of the dominant filling (no normalizer division)."""
    tab = top_tableau(shape, cfg.labels)
    base = conjugate(shape.outer).part(1) - shape.outer.width()
    atoms: list = []
    sign = 0
    for i, j, label in tab.entries:
        zt = z_term(cfg, label, rs, base - 2 * i + 2 * j)
        atoms.extend(zt.atoms)
        sign += cfg.labels.parity(label)
    coeff = 1 if rs.exact else (1 + 0j)
    if sign % 2:
        coeff = -coeff
    return FactoredTerm(coeff, atoms, exact=rs.exact)


# ---------------------------------------------------------------------------
# Mixed-alphabet identity and crossing
# ---------------------------------------------------------------------------

def mixed_identity_residual(r: int, s: int, rs: BetheRootSet) -> TermSum:
    """Pair sum over both alphabets minus its 2x2 determinant form.

    Defined for r != s with a trivial vacuum; the excluded pair (-1, 1) is
    exactly the product that collapses to 1.
    """
    if r == s:
        raise EqualRankError("the mixed identity requires r != s")
    if rs.n_sites != 0:
        raise ValueError("the mixed identity assumes a trivial vacuum")
    cov = preset("distinguished-covariant", r, s)
    con = preset("distinguished-contravariant", r, s)
    qp = rs.qp
    terms = []
    for a in con.labels.labels:
        pa = con.labels.parity(a)
        for b in cov.labels.labels:
            if (a, b) == (-1, 1):
                continue
            pb = cov.labels.parity(b)
            sign = -1 if (pa + pb) % 2 else 1
            terms.append((z_term(con, a, rs, s) * z_term(cov, b, rs, r))
                         .scaled(sign))
    pair_sum = TermSum(qp, terms)
    one_cell = SkewShape(Partition(()), Partition((1,)))
    t1_dot = shift_u(t_skew(con, one_cell, rs), s)
    t1 = shift_u(t_skew(cov, one_cell, rs), r)
    det = t1_dot * t1 - TermSum.const(qp, 1)
    return pair_sum - det


def crossing_residual(r: int, s: int, a: int, rs: BetheRootSet) -> TermSum:
    """Covariant box minus the reflected, parameter-negated contravariant box.

    The reflection u -> s - r - u inverts multipliers; all Bethe roots and
    inhomogeneities are negated on the dotted side, and the whole dotted box
    carries the sign (-1)^N for N sites.
    """
    cov = preset("distinguished-covariant", r, s)
    con = preset("distinguished-contravariant", r, s,
                 quantum_space="covariant")
    zdot = z_function(con, -a, rs.negated())
    reflected = reflect_u(zdot, s - r)
    sign = -1 if rs.n_sites % 2 else 1
    return z_function(cov, a, rs) - reflected * sign
