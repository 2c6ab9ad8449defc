"""Skew Young superdiagram combinatorics.

Partitions are weakly decreasing tuples with trailing zeros trimmed; a skew
shape is an inner partition contained in an outer one.  Coordinates (i, j)
are 1-based, row index growing downward and column index rightward, with
(1, 1) at the top-left corner of the outer shape.  Unlike ordinary Young
diagrams there is no bound on the number of rows here; the only vanishing
mechanism is the rectangle criterion tested by contains_rectangle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator

__all__ = [
    "Partition",
    "SkewShape",
    "NotCovariantDominant",
    "conjugate",
    "contains_rectangle",
    "kac_dynkin_covariant",
    "kac_dynkin_contravariant",
    "random_skew_shape",
]


class NotCovariantDominant(Exception):
    """Shape violates the dominance bound required for highest-weight labels."""


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...]

    def __init__(self, parts=()):
        cleaned = [int(p) for p in parts]
        while cleaned and cleaned[-1] == 0:
            cleaned.pop()
        for a, b in zip(cleaned, cleaned[1:]):
            if b > a:
                raise ValueError(f"parts not weakly decreasing: {parts}")
        if any(p < 0 for p in cleaned):
            raise ValueError(f"negative part in {parts}")
        object.__setattr__(self, "parts", tuple(cleaned))

    def part(self, i: int) -> int:
        """1-based part access; zero beyond the last row."""
        return self.parts[i - 1] if 1 <= i <= len(self.parts) else 0

    def __len__(self):
        return len(self.parts)

    def size(self) -> int:
        return sum(self.parts)

    def width(self) -> int:
        return self.parts[0] if self.parts else 0

    def contains(self, other: "Partition") -> bool:
        return all(self.part(i) >= other.part(i)
                   for i in range(1, len(other) + 1))

    def __repr__(self):
        return f"Partition{self.parts}"


def conjugate(p: Partition) -> Partition:
    """Transpose: conjugate(p)_j = #{i : p_i >= j}."""
    if not p.parts:
        return Partition()
    return Partition(tuple(sum(1 for part in p.parts if part >= j)
                           for j in range(1, p.parts[0] + 1)))


@dataclass(frozen=True)
class SkewShape:
    inner: Partition
    outer: Partition

    def __init__(self, inner, outer):
        if not isinstance(inner, Partition):
            inner = Partition(inner)
        if not isinstance(outer, Partition):
            outer = Partition(outer)
        if not outer.contains(inner):
            raise ValueError(f"inner {inner} not contained in outer {outer}")
        object.__setattr__(self, "inner", inner)
        object.__setattr__(self, "outer", outer)

    def cells(self) -> Iterator[tuple[int, int]]:
        """Row-major scan of the skew cells, 1-based coordinates."""
        for i in range(1, len(self.outer) + 1):
            for j in range(self.inner.part(i) + 1, self.outer.part(i) + 1):
                yield (i, j)

    def cell_count(self) -> int:
        return self.outer.size() - self.inner.size()

    def is_empty(self) -> bool:
        return self.cell_count() == 0

    def has_cell(self, i: int, j: int) -> bool:
        return self.inner.part(i) < j <= self.outer.part(i)

    def width(self) -> int:
        return self.outer.width()

    def height(self) -> int:
        return len(self.outer)

    def column_rows(self, j: int) -> tuple[int, int]:
        """Rows occupied by column j, inclusive range (top, bottom)."""
        inner_c = conjugate(self.inner)
        outer_c = conjugate(self.outer)
        return inner_c.part(j) + 1, outer_c.part(j)

    def __repr__(self):
        return f"SkewShape({self.inner.parts} in {self.outer.parts})"


def contains_rectangle(shape: SkewShape, rows: int, cols: int) -> bool:
    """Whether some rows x cols block lies entirely inside the skew region."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    height = shape.height()
    width = shape.width()
    for i1 in range(1, height - rows + 2):
        for j1 in range(1, width - cols + 2):
            if all(shape.has_cell(i, j)
                   for i in range(i1, i1 + rows)
                   for j in range(j1, j1 + cols)):
                return True
    return False


def kac_dynkin_covariant(mu: Partition, r: int, s: int) -> tuple[int, ...]:
    """Highest-weight labels a_1..a_{r+s+1} of the covariant diagram mu.

    Requires the dominance bound mu_{r+2} <= s+1; eta_j = max(mu'_j - r - 1, 0)
    carries the odd tail of the weight.
    """
    if mu.part(r + 2) > s + 1:
        raise NotCovariantDominant(
            f"mu_(r+2) = {mu.part(r + 2)} exceeds s+1 = {s + 1}")
    muc = conjugate(mu)
    eta = [max(muc.part(j) - r - 1, 0) for j in range(1, s + 3)]
    labels = [mu.part(j) - mu.part(j + 1) for j in range(1, r + 1)]
    labels.append(mu.part(r + 1) + eta[0])
    labels.extend(eta[j - 1] - eta[j] for j in range(1, s + 1))
    return tuple(labels)


def kac_dynkin_contravariant(mu_dot: Partition, r: int, s: int) -> tuple[int, ...]:
    """Labels of the contravariant diagram, mirrored bound mu_dot'_{s+2} <= r+1."""
    muc = conjugate(mu_dot)
    if muc.part(s + 2) > r + 1:
        raise NotCovariantDominant(
            f"mu'_(s+2) = {muc.part(s + 2)} exceeds r+1 = {r + 1}")
    xi = [max(mu_dot.part(j) - s - 1, 0) for j in range(1, r + 3)]
    labels = [0] * (r + s + 1)
    for j in range(1, r + 1):
        labels[r - j] = xi[j - 1] - xi[j]
    labels[r] = -xi[0] - muc.part(s + 1)
    for j in range(1, s + 1):
        labels[r + s + 1 - j] = muc.part(j) - muc.part(j + 1)
    return tuple(labels)


def random_partition(rng: random.Random, max_width: int, max_height: int) -> Partition:
    height = rng.randint(1, max_height)
    parts = [rng.randint(1, max_width)]
    for _ in range(height - 1):
        nxt = rng.randint(0, parts[-1])
        if nxt == 0:
            break
        parts.append(nxt)
    return Partition(parts)


def random_skew_shape(rng: random.Random, max_width: int, max_height: int,
                      *, nonempty: bool = True) -> SkewShape:
    """Seeded random skew shape with outer width/height bounds."""
    while True:
        outer = random_partition(rng, max_width, max_height)
        if rng.random() < 0.4:
            inner_parts = []
        else:
            inner_parts = [rng.randint(0, max(0, p - 1))
                           for p in outer.parts]
            for i in range(len(inner_parts) - 2, -1, -1):
                inner_parts[i] = max(inner_parts[i], inner_parts[i + 1])
        shape = SkewShape(Partition(inner_parts), outer)
        if shape.cell_count() > 0 or not nonempty:
            return shape
