# Author: Green Mountain Systems AI Inc.

"""Power-law exponent fits on log-log data."""

import logging
import math
from typing import Sequence

import numpy as np
from scipy import stats

from ..errors import DomainError
from ..models.reports import ExponentFit

logger = logging.getLogger(__name__)


def fit_exponent(points: Sequence[tuple[float, float]]) -> ExponentFit:
    """Least squares fit of ln y = slope ln x + intercept with a 95% interval.

    Args:
        points: (x, y) pairs with x, y > 0

    Returns:
        ExponentFit with the slope interval slope +- t_{0.975, n-2} stderr

    Raises:
        DomainError: With fewer than 3 points, nonpositive values or a
            degenerate x grid
    """
    if len(points) < 3:
        raise DomainError(f"need at least 3 points to fit an exponent, got {len(points)}")
    xs = np.array([p[0] for p in points], dtype=float)
    ys = np.array([p[1] for p in points], dtype=float)
    if not (np.all(xs > 0) and np.all(ys > 0) and np.all(np.isfinite(ys))):
        raise DomainError("exponent fits need positive finite x and y")
    lx, ly = np.log(xs), np.log(ys)
    if np.ptp(lx) == 0.0:
        raise DomainError("degenerate x grid: all x values coincide")

    result = stats.linregress(lx, ly)
    n = len(points)
    stderr = float(result.stderr) if n > 2 else math.inf
    half = float(stats.t.ppf(0.975, n - 2)) * stderr
    fit = ExponentFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        ci_low=float(result.slope) - half,
        ci_high=float(result.slope) + half,
        stderr=stderr,
        points=n,
    )
    logger.debug("Fitted slope %.4f +- %.4f over %d points", fit.slope, half, n)
    return fit


def fitted_curve(fit: ExponentFit, xs: Sequence[float]) -> list[float]:
    """exp(intercept) x^slope at the given abscissae."""
    return [math.exp(fit.intercept) * float(x) ** fit.slope for x in xs]
