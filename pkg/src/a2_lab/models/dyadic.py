# Author: Green Mountain Systems AI Inc.

"""Dyadic intervals and piecewise-constant functions on dyadic grids."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterator, Union

import numpy as np


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """The interval [index * 2**-level, (index + 1) * 2**-level).

    The minus (left) child has index 2j and the plus (right) child 2j + 1.
    """

    level: int
    index: int

    def __post_init__(self) -> None:
        if self.level < 0:
            raise ValueError(f"dyadic level must be >= 0, got {self.level}")

    @classmethod
    def root(cls) -> DyadicInterval:
        """I0 = [0, 1)."""
        return cls(0, 0)

    @classmethod
    def from_path(cls, bits: Union[str, tuple[int, ...]], base: DyadicInterval | None = None) -> DyadicInterval:
        """Descend from ``base`` (default I0) along bits; '1' is the plus child."""
        node = base or cls.root()
        for bit in bits:
            node = node.plus if int(bit) else node.minus
        return node

    # ===== Tree navigation =====

    @property
    def minus(self) -> DyadicInterval:
        return DyadicInterval(self.level + 1, 2 * self.index)

    @property
    def plus(self) -> DyadicInterval:
        return DyadicInterval(self.level + 1, 2 * self.index + 1)

    def children(self) -> tuple[DyadicInterval, DyadicInterval]:
        return self.minus, self.plus

    def parent(self) -> DyadicInterval:
        if self.level == 0:
            raise ValueError("a level-0 interval has no dyadic parent")
        return DyadicInterval(self.level - 1, self.index >> 1)

    def sibling(self) -> DyadicInterval:
        return DyadicInterval(self.level, self.index ^ 1)

    @property
    def is_plus(self) -> bool:
        return bool(self.index & 1)

    def descendants(self, generations: int) -> Iterator[DyadicInterval]:
        first = self.index << generations
        for index in range(first, first + (1 << generations)):
            yield DyadicInterval(self.level + generations, index)

    def contains(self, other: DyadicInterval) -> bool:
        if other.level < self.level:
            return False
        return other.index >> (other.level - self.level) == self.index

    def offset_in(self, ancestor: DyadicInterval) -> int:
        """Index of self among the descendants of ``ancestor`` at its level."""
        if not ancestor.contains(self):
            raise ValueError(f"{self} is not inside {ancestor}")
        return self.index - (ancestor.index << (self.level - ancestor.level))

    def is_inside_root(self) -> bool:
        return 0 <= self.index < (1 << self.level)

    # ===== Geometry (exact) =====

    @property
    def length(self) -> Fraction:
        return Fraction(1, 1 << self.level)

    @property
    def left(self) -> Fraction:
        return Fraction(self.index, 1 << self.level)

    @property
    def right(self) -> Fraction:
        return Fraction(self.index + 1, 1 << self.level)

    def __str__(self) -> str:
        return f"[{dyadic_decimal(self.left)}, {dyadic_decimal(self.right)})"


def dyadic_decimal(x: Fraction) -> str:
    """Exact decimal expansion of a dyadic rational."""
    with localcontext() as ctx:
        ctx.prec = max(28, 2 * x.denominator.bit_length() + 8)
        return format(Decimal(x.numerator) / Decimal(x.denominator), "f")


@dataclass(frozen=True, eq=False)
class PiecewiseFn:
    """Function constant on the 2**depth dyadic cells of ``origin``.

    ``values`` has shape (2**depth,) + value_shape where value_shape is () for
    scalars, (2,) for R^2 vectors and (2, 2) for symmetric matrices.
    """

    depth: int
    origin: DyadicInterval
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.depth < 0:
            raise ValueError(f"depth must be >= 0, got {self.depth}")
        if self.values.shape[:1] != (1 << self.depth,):
            raise ValueError(
                f"expected {1 << self.depth} cell values, got array of shape {self.values.shape}"
            )

    # ===== Constructors =====

    @classmethod
    def constant(
        cls, value: Union[float, np.ndarray], depth: int = 0, origin: DyadicInterval | None = None
    ) -> PiecewiseFn:
        value = np.asarray(value, dtype=float)
        values = np.broadcast_to(value, ((1 << depth),) + value.shape).copy()
        return cls(depth, origin or DyadicInterval.root(), values)

    @classmethod
    def indicator(
        cls,
        interval: DyadicInterval,
        value: Union[float, np.ndarray] = 1.0,
        depth: int | None = None,
        origin: DyadicInterval | None = None,
    ) -> PiecewiseFn:
        """value * 1_interval on a grid of ``origin`` fine enough to resolve it."""
        origin = origin or DyadicInterval.root()
        rel = interval.level - origin.level
        depth = rel if depth is None else depth
        if depth < rel:
            raise ValueError(f"depth {depth} cannot resolve {interval}")
        value = np.asarray(value, dtype=float)
        values = np.zeros(((1 << depth),) + value.shape)
        span = 1 << (depth - rel)
        start = interval.offset_in(origin) * span
        values[start : start + span] = value
        return cls(depth, origin, values)

    @classmethod
    def haar_hat(
        cls, interval: DyadicInterval, depth: int | None = None, origin: DyadicInterval | None = None
    ) -> PiecewiseFn:
        """The L-infinity normalized Haar function 1_{I+} - 1_{I-}."""
        plus = cls.indicator(interval.plus, 1.0, depth, origin)
        minus = cls.indicator(interval.minus, 1.0, plus.depth, origin)
        return plus - minus

    @classmethod
    def haar(
        cls, interval: DyadicInterval, depth: int | None = None, origin: DyadicInterval | None = None
    ) -> PiecewiseFn:
        """The L2 normalized Haar function |I|^{-1/2} (1_{I+} - 1_{I-})."""
        return cls.haar_hat(interval, depth, origin).scale(2.0 ** (interval.level / 2))

    # ===== Shape =====

    @property
    def cells(self) -> int:
        return 1 << self.depth

    @property
    def value_shape(self) -> tuple[int, ...]:
        return tuple(self.values.shape[1:])

    @property
    def absolute_depth(self) -> int:
        """Absolute dyadic level of the cells."""
        return self.origin.level + self.depth

    @property
    def cell_length(self) -> float:
        return 2.0 ** -self.absolute_depth

    def cell_interval(self, i: int) -> DyadicInterval:
        return DyadicInterval(self.absolute_depth, (self.origin.index << self.depth) + i)

    # ===== Averages and refinement =====

    def averages(self, rel_level: int) -> np.ndarray:
        """Averages over the 2**rel_level subintervals of ``origin`` at that relative level."""
        if not 0 <= rel_level <= self.depth:
            raise ValueError(f"relative level {rel_level} outside 0..{self.depth}")
        shaped = self.values.reshape((1 << rel_level, 1 << (self.depth - rel_level)) + self.value_shape)
        return shaped.mean(axis=1)

    def average_on(self, interval: DyadicInterval) -> np.ndarray:
        rel = interval.level - self.origin.level
        if rel > self.depth:
            return self.values[interval.offset_in(self.origin) >> (rel - self.depth)].copy()
        span = 1 << (self.depth - rel)
        start = interval.offset_in(self.origin) * span
        return self.values[start : start + span].mean(axis=0)

    def mean(self) -> np.ndarray:
        return self.values.mean(axis=0)

    def upsample(self, depth: int) -> PiecewiseFn:
        if depth < self.depth:
            raise ValueError(f"cannot upsample depth {self.depth} to {depth}")
        if depth == self.depth:
            return self
        return PiecewiseFn(depth, self.origin, np.repeat(self.values, 1 << (depth - self.depth), axis=0))

    def restrict(self, interval: DyadicInterval) -> PiecewiseFn:
        """The restriction to a subinterval, as a function with that origin."""
        rel = interval.level - self.origin.level
        f = self if rel <= self.depth else self.upsample(rel)
        span = 1 << (f.depth - rel)
        start = interval.offset_in(f.origin) * span
        return PiecewiseFn(f.depth - rel, interval, f.values[start : start + span].copy())

    # ===== Arithmetic =====

    def _aligned(self, other: PiecewiseFn) -> tuple[PiecewiseFn, PiecewiseFn]:
        if self.origin != other.origin:
            raise ValueError(f"grid mismatch: origins {self.origin} and {other.origin}")
        depth = max(self.depth, other.depth)
        return self.upsample(depth), other.upsample(depth)

    def __add__(self, other: PiecewiseFn) -> PiecewiseFn:
        a, b = self._aligned(other)
        return PiecewiseFn(a.depth, a.origin, a.values + b.values)

    def __sub__(self, other: PiecewiseFn) -> PiecewiseFn:
        a, b = self._aligned(other)
        return PiecewiseFn(a.depth, a.origin, a.values - b.values)

    def scale(self, factor: float) -> PiecewiseFn:
        return PiecewiseFn(self.depth, self.origin, factor * self.values)

    def matvec(self, vectors: PiecewiseFn) -> PiecewiseFn:
        """Cellwise matrix-vector product (self matrix valued, ``vectors`` R^2 valued)."""
        m, x = self._aligned(vectors)
        return PiecewiseFn(m.depth, m.origin, np.einsum("nij,nj->ni", m.values, x.values))

    def allclose(self, other: PiecewiseFn, atol: float = 1e-12) -> bool:
        a, b = self._aligned(other)
        return bool(np.allclose(a.values, b.values, rtol=0.0, atol=atol))

    # ===== Export =====

    def dump_rows(self) -> list[dict[str, str]]:
        """One row per cell with exact endpoints and flattened values."""
        rows = []
        for i in range(self.cells):
            cell = self.cell_interval(i)
            flat = np.atleast_1d(self.values[i]).ravel()
            row = {"left": dyadic_decimal(cell.left), "right": dyadic_decimal(cell.right)}
            row.update({f"v{j}": repr(float(x)) for j, x in enumerate(flat)})
            rows.append(row)
        return rows
