"""Admissible supertableaux on skew shapes over a graded, ordered alphabet.

The alphabet J = J+ (even) union J- (odd) carries a total order.  A filling
is admissible when

  (i)   entries strictly increase down a column whenever both members of
        the adjacent pair are even,
  (ii)  entries strictly increase along a row whenever both members of the
        adjacent pair are odd,
  (iii) entries weakly increase along rows and down columns throughout.

The strictness rules are scoped to pairs of like parity; mixed pairs only
obey the weak rule.  This scoping reproduces every worked single-row and
single-column expansion used as a fixture, and it makes vertical repetition
of odd entries (and horizontal repetition of even entries) legal, which is
why columns can be arbitrarily long.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .diagrams import NotCovariantDominant, SkewShape, conjugate

__all__ = [
    "LabelSet",
    "Tableau",
    "enumerate_tableaux",
    "count_tableaux",
    "top_tableau",
    "distinguished_labels",
]


@dataclass(frozen=True)
class LabelSet:
    """Totally ordered alphabet with parities, in increasing order."""

    labels: tuple
    parities: tuple[int, ...]

    def __init__(self, labels, parities):
        labels = tuple(labels)
        parities = tuple(int(p) for p in parities)
        if len(labels) != len(parities):
            raise ValueError("labels and parities must align")
        if any(p not in (0, 1) for p in parities):
            raise ValueError("parities must be 0 or 1")
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be distinct")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "parities", parities)

    def parity(self, label) -> int:
        return self.parities[self.labels.index(label)]

    def order_index(self, label) -> int:
        return self.labels.index(label)

    @property
    def even_labels(self) -> tuple:
        return tuple(l for l, p in zip(self.labels, self.parities) if p == 0)

    @property
    def odd_labels(self) -> tuple:
        return tuple(l for l, p in zip(self.labels, self.parities) if p == 1)

    def __len__(self):
        return len(self.labels)


def distinguished_labels(r: int, s: int) -> LabelSet:
    """Alphabet 1..r+s+2 with the first r+1 labels even."""
    n = r + s + 2
    return LabelSet(tuple(range(1, n + 1)),
                    tuple(0 if a <= r + 1 else 1 for a in range(1, n + 1)))


@dataclass(frozen=True)
class Tableau:
    shape: SkewShape
    entries: tuple  # ((i, j, label), ...) in row-major cell order

    def entry(self, i: int, j: int):
        for ci, cj, label in self.entries:
            if ci == i and cj == j:
                return label
        raise KeyError((i, j))

    def as_dict(self) -> dict:
        return {(i, j): label for i, j, label in self.entries}


def _horizontal_ok(left_idx: int, cand_idx: int, left_par: int) -> bool:
    # weak always; strict when both odd (equal labels share parity)
    return cand_idx > left_idx or (cand_idx == left_idx and left_par == 0)


def _vertical_ok(up_idx: int, cand_idx: int, up_par: int) -> bool:
    # weak always; strict when both even
    return cand_idx > up_idx or (cand_idx == up_idx and up_par == 1)


def enumerate_tableaux(shape: SkewShape, labels: LabelSet) -> Iterator[Tableau]:
    """All admissible tableaux, in row-major-then-label lexicographic order."""
    cells = list(shape.cells())
    if not cells:
        yield Tableau(shape, ())
        return
    n_labels = len(labels.labels)
    parities = labels.parities
    cell_index = {c: k for k, c in enumerate(cells)}
    assignment = [0] * len(cells)

    def candidates(pos: int) -> Iterator[int]:
        i, j = cells[pos]
        lo = 0
        left = cell_index.get((i, j - 1))
        up = cell_index.get((i - 1, j))
        for idx in range(lo, n_labels):
            if left is not None:
                li = assignment[left]
                if not _horizontal_ok(li, idx, parities[li]):
                    continue
            if up is not None:
                ui = assignment[up]
                if not _vertical_ok(ui, idx, parities[ui]):
                    continue
            yield idx

    def rec(pos: int) -> Iterator[Tableau]:
        if pos == len(cells):
            yield Tableau(shape, tuple(
                (i, j, labels.labels[assignment[k]])
                for k, (i, j) in enumerate(cells)))
            return
        for idx in candidates(pos):
            assignment[pos] = idx
            yield from rec(pos + 1)

    yield from rec(0)


def count_tableaux(shape: SkewShape, labels: LabelSet) -> int:
    return sum(1 for _ in enumerate_tableaux(shape, labels))


def top_tableau(shape: SkewShape, labels: LabelSet) -> Tableau:
    """The dominant filling of a straight covariant shape.

    Rows 1..r+1 are filled with their own row index; below that, column j is
    filled with the constant label r+j+1.  Requires inner = empty, the
    distinguished alphabet, and the dominance bound mu_{r+2} <= s+1.
    """
    if not shape.inner.parts == ():
        raise ValueError("top tableau requires an empty inner shape")
    even = labels.even_labels
    r = len(even) - 1
    s = len(labels.odd_labels) - 1
    if labels.labels != tuple(range(1, r + s + 3)) or \
            labels.parities != tuple(0 if a <= r + 1 else 1
                                     for a in range(1, r + s + 3)):
        raise ValueError("top tableau is defined for the distinguished alphabet")
    mu = shape.outer
    if mu.part(r + 2) > s + 1:
        raise NotCovariantDominant(
            f"mu_(r+2) = {mu.part(r + 2)} exceeds s+1 = {s + 1}")
    entries = []
    for i, j in shape.cells():
        entries.append((i, j, i if i <= r + 1 else r + j + 1))
    return Tableau(shape, tuple(entries))
