# Author: Green Mountain Systems AI Inc.

"""Haar analysis and synthesis, conditional expectations and martingale differences.

Functions are stored by leaf values; Haar coefficient tables are derived
views computed level by level from cell averages.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import DepthExceededError
from ..models.dyadic import DyadicInterval, PiecewiseFn

logger = logging.getLogger(__name__)


@dataclass
class HaarTable:
    """Mean and Haar coefficients (f, h_I) of a piecewise function."""

    depth: int
    origin: DyadicInterval
    mean: np.ndarray  # <f> over origin
    coefficients: list[np.ndarray] = field(default_factory=list)  # [rel level] -> (2**level, *shape)

    def coefficient(self, interval: DyadicInterval) -> np.ndarray:
        rel = interval.level - self.origin.level
        if not 0 <= rel < self.depth:
            return np.zeros_like(self.mean)
        return self.coefficients[rel][interval.offset_in(self.origin)]

    def half_length(self, rel_level: int) -> float:
        """|I|^{1/2} for intervals at a relative level."""
        return 2.0 ** (-(self.origin.level + rel_level) / 2)


def haar_analyze(f: PiecewiseFn) -> HaarTable:
    """Mean over the origin and (f, h_I) for every dyadic I of relative level < depth.

    With h_I = |I|^{-1/2}(1_{I+} - 1_{I-}) the coefficient is
    |I|^{1/2} (<f>_{I+} - <f>_{I-}) / 2.
    """
    table = HaarTable(f.depth, f.origin, f.mean())
    averages = f.values
    by_level: list[np.ndarray] = []
    for rel in range(f.depth - 1, -1, -1):
        pairs = averages.reshape((1 << rel, 2) + f.value_shape)
        by_level.append(0.5 * table.half_length(rel) * (pairs[:, 1] - pairs[:, 0]))
        averages = pairs.mean(axis=1)
    table.coefficients = by_level[::-1]
    return table


def haar_synthesize(table: HaarTable) -> PiecewiseFn:
    """Inverse of haar_analyze: <f>_{I+-} = <f>_I +- |I|^{-1/2} (f, h_I)."""
    averages = np.asarray(table.mean, dtype=float)[None, ...]
    for rel, coeffs in enumerate(table.coefficients):
        jump = coeffs / table.half_length(rel)
        averages = np.stack([averages - jump, averages + jump], axis=1).reshape(
            (1 << (rel + 1),) + averages.shape[1:]
        )
    return PiecewiseFn(table.depth, table.origin, averages)


def expectation(f: PiecewiseFn, rel_level: int) -> PiecewiseFn:
    """E_k f: replace f by its averages on the cells of relative level k."""
    if rel_level >= f.depth:
        return f
    averages = f.averages(rel_level)
    return PiecewiseFn(f.depth, f.origin, np.repeat(averages, 1 << (f.depth - rel_level), axis=0))


def martingale_diff(f: PiecewiseFn, interval: DyadicInterval, order: int = 1) -> PiecewiseFn:
    """Delta^order_I f = -E_I f + sum_{J in ch^order(I)} E_J f, supported on I.

    Raises:
        DepthExceededError: If the grid does not resolve ch^order(I)
    """
    if interval.level + order > f.absolute_depth:
        raise DepthExceededError(interval.level + order, f.absolute_depth, "martingale level")
    local = f.restrict(interval)
    diff = expectation(local, order).values - local.values.mean(axis=0)
    values = np.zeros_like(f.values)
    rel = interval.level - f.origin.level
    span = 1 << (f.depth - rel)
    start = interval.offset_in(f.origin) * span
    values[start : start + span] = diff
    return PiecewiseFn(f.depth, f.origin, values)


def martingale_diff2(f: PiecewiseFn, interval: DyadicInterval) -> PiecewiseFn:
    """Second order martingale difference Delta^2_I f."""
    return martingale_diff(f, interval, order=2)


def affine_pullback(f: PiecewiseFn, interval: DyadicInterval) -> PiecewiseFn:
    """f o psi_{J,I}: the same cell values carried over onto ``interval``."""
    return PiecewiseFn(f.depth, interval, f.values.copy())


def in_range_delta2(f: PiecewiseFn, interval: DyadicInterval, atol: float = 1e-12) -> bool:
    """True when f = Delta^2_I f, i.e. f lies in Ran Delta^2_I."""
    return martingale_diff2(f, interval).allclose(f, atol=atol)
