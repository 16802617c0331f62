"""Branched box domains and interval superposition models.

A Domain is a box in R^n with every axis cut into N equidistant branches.
A SuperpositionModel attaches an n x N matrix of interval coefficients to a
Domain: the model's value at a point x is the interval sum of one coefficient
per row, the one whose branch contains the corresponding coordinate of x.
Because each row depends on a single coordinate, the exact range of the model
is the sum of per-row minima and maxima and costs O(nN) to evaluate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .interval import Interval, _add_down, _add_up, _sub_up

__all__ = [
    "Domain",
    "SuperpositionModel",
    "RangeBounds",
    "OutOfDomain",
    "DomainMismatch",
    "init_variable",
    "init_constant",
]


class OutOfDomain(ValueError):
    """A point or index lies outside the domain box."""


class DomainMismatch(ValueError):
    """Binary model operation over two different domains."""


@dataclass(frozen=True, slots=True)
class Domain:
    """Box [lo_1, hi_1] x ... x [lo_n, hi_n] with N branches per axis.

    Axes and branches are indexed from 0.  Branch j of axis i is
    [lo_i + j*h_i, lo_i + (j+1)*h_i] with h_i = (hi_i - lo_i) / N; the last
    branch ends exactly at the box endpoint rather than at an accumulated sum.
    """

    boxes: tuple[Interval, ...]
    branches: int

    def __post_init__(self) -> None:
        if not self.boxes:
            raise ValueError("domain needs at least one axis")
        if self.branches < 1:
            raise ValueError(f"branch count must be positive, got {self.branches}")
        for i, box in enumerate(self.boxes):
            if not box.lo < box.hi:
                raise ValueError(f"axis {i} box [{box.lo}, {box.hi}] is degenerate")

    @classmethod
    def of(cls, bounds: Iterable[tuple[float, float] | Interval], branches: int) -> Domain:
        boxes = tuple(b if isinstance(b, Interval) else Interval(*b) for b in bounds)
        return cls(boxes, branches)

    @property
    def dim(self) -> int:
        return len(self.boxes)

    def step(self, axis: int) -> float:
        box = self.boxes[axis]
        return (box.hi - box.lo) / self.branches

    def _grid(self, axis: int, j: int) -> float:
        """j-th grid point of an axis, clamped so the grid stays inside the box."""
        box = self.boxes[axis]
        if j <= 0:
            return box.lo
        if j >= self.branches:
            return box.hi
        return min(box.lo + j * self.step(axis), box.hi)

    def branch_interval(self, axis: int, j: int) -> Interval:
        if not 0 <= axis < self.dim:
            raise IndexError(f"axis {axis} out of range for dimension {self.dim}")
        if not 0 <= j < self.branches:
            raise IndexError(f"branch {j} out of range for N={self.branches}")
        return Interval(self._grid(axis, j), self._grid(axis, j + 1))

    def branch_index(self, axis: int, x: float) -> int:
        """Branch containing x: branches are half-open below the top endpoint.

        The grid point shared by branches j and j+1 belongs to branch j+1;
        the box's upper endpoint belongs to the last branch.
        """
        box = self.boxes[axis]
        if not box.contains(x):
            raise OutOfDomain(f"{x} outside axis-{axis} box [{box.lo}, {box.hi}]")
        j = int((x - box.lo) / self.step(axis))
        j = min(max(j, 0), self.branches - 1)
        while j > 0 and x < self._grid(axis, j):
            j -= 1
        while j < self.branches - 1 and x >= self._grid(axis, j + 1):
            j += 1
        return j


@dataclass(frozen=True, slots=True)
class RangeBounds:
    """Exact range [lo, hi] of a model plus the per-row minima and maxima."""

    lo: float
    hi: float
    row_lo: tuple[float, ...]
    row_hi: tuple[float, ...]


@dataclass(frozen=True, slots=True)
class SuperpositionModel:
    """n x N interval coefficient matrix tied to a Domain.

    ``support`` is bookkeeping for rows known to carry structure; rows outside
    it must be constant across branches (typically all [0, 0]), which keeps
    untouched rows recognizably trivial through long operation chains.
    """

    domain: Domain
    coeffs: tuple[tuple[Interval, ...], ...]
    support: frozenset[int]

    def __post_init__(self) -> None:
        n, cap = self.domain.dim, self.domain.branches
        if len(self.coeffs) != n:
            raise ValueError(f"coefficient matrix has {len(self.coeffs)} rows, domain has {n}")
        for i, row in enumerate(self.coeffs):
            if len(row) != cap:
                raise ValueError(f"row {i} has {len(row)} entries, expected {cap}")
        for i in range(n):
            if i in self.support:
                continue
            row = self.coeffs[i]
            if any(e != row[0] for e in row):
                raise ValueError(f"row {i} outside the support varies across branches")

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def branches(self) -> int:
        return self.domain.branches

    def row(self, i: int) -> tuple[Interval, ...]:
        return self.coeffs[i]

    def range_bounds(self) -> RangeBounds:
        """Exact model range via per-row extrema (outward-rounded sums)."""
        row_lo = tuple(min(e.lo for e in row) for row in self.coeffs)
        row_hi = tuple(max(e.hi for e in row) for row in self.coeffs)
        lo = 0.0
        hi = 0.0
        for a, b in zip(row_lo, row_hi):
            lo = _add_down(lo, a)
            hi = _add_up(hi, b)
        return RangeBounds(lo, hi, row_lo, row_hi)

    def evaluate(self, x: Sequence[float]) -> Interval:
        """Interval value at a point: sum of the branch-selected coefficients."""
        if len(x) != self.dim:
            raise OutOfDomain(f"point has {len(x)} coordinates, domain has {self.dim}")
        acc = Interval(0.0, 0.0)
        for i, xi in enumerate(x):
            acc = acc + self.coeffs[i][self.domain.branch_index(i, xi)]
        return acc

    def is_separable(self) -> bool:
        """True when at most one row has positive width across its branches."""
        wide = 0
        for row in self.coeffs:
            if min(e.lo for e in row) < max(e.hi for e in row):
                wide += 1
                if wide > 1:
                    return False
        return True


def init_variable(domain: Domain, axis: int) -> SuperpositionModel:
    """Model of the coordinate function x -> x_axis: row `axis` holds the
    branch intervals, every other row is zero."""
    if not 0 <= axis < domain.dim:
        raise IndexError(f"axis {axis} out of range for dimension {domain.dim}")
    zero = Interval(0.0, 0.0)
    rows = []
    for i in range(domain.dim):
        if i == axis:
            rows.append(tuple(domain.branch_interval(i, j) for j in range(domain.branches)))
        else:
            rows.append((zero,) * domain.branches)
    return SuperpositionModel(domain, tuple(rows), frozenset({axis}))


def init_constant(domain: Domain, c: float) -> SuperpositionModel:
    """Model of the constant function: [c, c] in row 0, zeros elsewhere."""
    if not math.isfinite(c):
        raise ValueError(f"constant must be finite, got {c}")
    zero = Interval(0.0, 0.0)
    point = Interval.point(c)
    rows = [(point,) * domain.branches]
    rows += [(zero,) * domain.branches for _ in range(domain.dim - 1)]
    return SuperpositionModel(domain, tuple(rows), frozenset())


def _affine(
    m: SuperpositionModel, scale: float | Interval, shift: float | Interval = 0.0
) -> SuperpositionModel:
    """Entrywise scale plus a shift added to row 0.  Exact and remainder-free;
    the caller guarantees a nonzero scale so the support stays meaningful."""
    rows = [tuple(e * scale for e in row) for row in m.coeffs]
    if isinstance(shift, Interval) or shift != 0.0:
        rows[0] = tuple(e + shift for e in rows[0])
    return SuperpositionModel(m.domain, tuple(rows), m.support)


def _avg_diam(row: Sequence[Interval]) -> float:
    return sum(_sub_up(e.hi, e.lo) for e in row) / len(row)


def _pick_remainder_row(rows: Sequence[Sequence[Interval]], support: frozenset[int]) -> int:
    """Row that absorbs a remainder term: the support row whose entries have
    the largest average diameter, lowest index on ties, row 0 as fallback."""
    candidates = sorted(support) if support else [0]
    return max(candidates, key=lambda i: (_avg_diam(rows[i]), -i))
