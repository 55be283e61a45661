# Author: Green Mountain Systems AI Inc.

"""Sparse interval families derived from a weight model, with Carleson checks."""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..models.core import FamilyKind
from ..models.dyadic import DyadicInterval
from .weight_forge import WeightModel

logger = logging.getLogger(__name__)


@dataclass
class SparseFamily:
    """A collection of dyadic intervals with generation labels.

    ``lam`` is the Carleson constant the family is known to satisfy;
    ``carleson_constant`` measures the actual one.
    """

    kind: FamilyKind
    intervals: list[DyadicInterval]
    generations: list[int] = field(default_factory=list)
    lam: float = 2.0

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):  # type: ignore[no-untyped-def]
        return iter(self.intervals)

    @property
    def max_level(self) -> int:
        return max((I.level for I in self.intervals), default=0)

    def carleson_constant(self, depth: Optional[int] = None) -> float:
        """max over dyadic J of sum_{I in family, I inside J} |I| / |J|.

        Only intervals J containing a family member contribute, so the scan
        runs over their ancestors at every level 0..depth.
        """
        if not self.intervals:
            return 0.0
        depth = self.max_level if depth is None else depth
        levels = np.array([I.level for I in self.intervals], dtype=np.int64)
        indices = np.array([I.index for I in self.intervals], dtype=np.int64)
        best = 0.0
        for level in range(depth + 1):
            mask = levels >= level
            if not mask.any():
                break
            shift = levels[mask] - level
            keys = indices[mask] >> shift
            weights = np.ldexp(1.0, -shift)
            _, inverse = np.unique(keys, return_inverse=True)
            best = max(best, float(np.bincount(inverse, weights=weights).max()))
        return best


def stopping_family(model: WeightModel, first: int = 1, last: Optional[int] = None) -> SparseFamily:
    """S_first .. S_last; by default the paraproduct family S_1 .. S_{n_max - 1}."""
    last = model.n_max - 1 if last is None else last
    intervals: list[DyadicInterval] = []
    generations: list[int] = []
    for n in range(first, last + 1):
        batch = model.stopping_intervals(n)
        intervals += batch
        generations += [n] * len(batch)
    return SparseFamily(FamilyKind.STOPPING, intervals, generations, lam=2.0)


def parents_family(model: WeightModel, first: int = 1, last: Optional[int] = None) -> SparseFamily:
    """Dyadic parents of the stopping intervals S_first .. S_last."""
    base = stopping_family(model, first, last)
    return SparseFamily(
        FamilyKind.PARENTS, [I.parent() for I in base.intervals], base.generations, lam=4.0
    )


def stopping_terminal_family(model: WeightModel) -> SparseFamily:
    """All stopping intervals together with all terminal intervals."""
    intervals: list[DyadicInterval] = []
    generations: list[int] = []
    for n in range(model.n_max + 1):
        batch = model.stopping_intervals(n)
        intervals += batch
        generations += [n] * len(batch)
        if n < model.n_max:
            terminals = model.terminal_intervals(n)
            intervals += terminals
            generations += [n] * len(terminals)
    return SparseFamily(FamilyKind.STOPPING_TERMINAL, intervals, generations, lam=4.0)


def internal_family(model: WeightModel) -> SparseFamily:
    """Every non-leaf node: stopping, rotated and terminal intervals."""
    base = stopping_terminal_family(model)
    rotated = [I.parent() for n in range(1, model.n_max + 1) for I in model.stopping_intervals(n)]
    generations = base.generations + [
        n - 1 for n in range(1, model.n_max + 1) for _ in range(1 << n)
    ]
    return SparseFamily(FamilyKind.INTERNAL, base.intervals + rotated, generations, lam=6.0)


def build_family(model: WeightModel, kind: FamilyKind) -> SparseFamily:
    """Family of the requested kind.

    Raises:
        ValueError: If the kind is unknown
    """
    if kind == FamilyKind.STOPPING:
        return stopping_family(model)
    if kind == FamilyKind.PARENTS:
        return parents_family(model)
    if kind == FamilyKind.STOPPING_TERMINAL:
        return stopping_terminal_family(model)
    if kind == FamilyKind.INTERNAL:
        return internal_family(model)
    raise ValueError(f"Unknown family kind: {kind}")
