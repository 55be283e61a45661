# Author: Green Mountain Systems AI Inc.

"""Hilbert transform bilinear forms for piecewise-constant functions.

On the line, (H f, g) with H f(s) = (1/pi) p.v. int f(t) / (s - t) dt has a
closed form on every pair of cells [a, b) x [c, d):

    (1/pi) [F(d - b) - F(d - a) - F(c - b) + F(c - a)],  F(x) = x - x ln|x|.

On the circle (an interval I identified with T, measure dx/|I|) the
multiplier -i sgn(k) acts on Fourier coefficients. For M = 2**depth cells the
coefficient at frequency k is V_{k mod M} (1 - e^{-2 pi i k/M}) / (2 pi i k)
with V the DFT of the cell values, so

    (H f, g) = (2/pi^2) sum_{k >= 1} Im(V_r conj G_r) sin^2(pi r/M) / k^2,  r = k mod M.

Grouping k by residue turns the sum into trigamma values; truncating at K
leaves a tail of interlaced residues r and M - r with opposite signs,
bounded by S_VG / (pi^2 (K + 1)^2), S_VG = sum_r |V_r| |G_r|.
"""

import logging
import math
from typing import Optional

import numpy as np
from scipy.special import polygamma

from ..config import get_settings
from ..errors import DomainError, TruncationError
from ..models.core import ShiftKind
from ..models.dyadic import DyadicInterval, PiecewiseFn
from ..models.reports import KernelConstants, KernelIdentityCheck
from .dyadic_core import in_range_delta2
from .shifts import apply_shift

logger = logging.getLogger(__name__)

C0 = -math.log(2.0) / math.pi


# =============================================================================
# Line
# =============================================================================


def _antiderivative(x: np.ndarray) -> np.ndarray:
    """F(x) = x - x ln|x| with F(0) = 0.

    Both terms share a sign for |x| < 1, so small arguments lose no digits.
    Callers pass differences of dyadic cell edges, which are exact: either
    0 or at least one cell length.
    """
    ax = np.abs(x)
    safe = np.where(ax > 0.0, ax, 1.0)
    return np.where(ax > 0.0, x - x * np.log(safe), 0.0)


def _cell_edges(f: PiecewiseFn) -> tuple[np.ndarray, np.ndarray]:
    left = float(f.origin.left) + f.cell_length * np.arange(f.cells)
    return left, left + f.cell_length


def _flat_values(f: PiecewiseFn) -> np.ndarray:
    return f.values.reshape(f.cells, -1)


def pairing_line(f: PiecewiseFn, g: PiecewiseFn) -> float:
    """(H^R f, g) in L2(R) for functions extended by 0 outside their origins."""
    a, b = _cell_edges(f)
    c, d = _cell_edges(g)
    fv, gv = _flat_values(f), _flat_values(g)
    if fv.shape[1] != gv.shape[1]:
        raise DomainError(f"value shapes differ: {f.value_shape} and {g.value_shape}")
    # kernel[i, j] = pairing of the i-th cell of f with the j-th cell of g
    kernel = (
        _antiderivative(d[None, :] - b[:, None])
        - _antiderivative(d[None, :] - a[:, None])
        - _antiderivative(c[None, :] - b[:, None])
        + _antiderivative(c[None, :] - a[:, None])
    ) / math.pi
    return float(np.einsum("ik,ij,jk->", fv, kernel, gv))


def line_transform(f: PiecewiseFn, s: np.ndarray) -> np.ndarray:
    """H^R f at points ``s`` off the cell edges, one row per point."""
    a, b = _cell_edges(f)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    logs = np.log(np.abs(s[:, None] - a[None, :])) - np.log(np.abs(s[:, None] - b[None, :]))
    return logs @ _flat_values(f) / math.pi


# =============================================================================
# Circle
# =============================================================================


def _circle_spectra(f: PiecewiseFn, g: PiecewiseFn) -> tuple[np.ndarray, np.ndarray, int]:
    """(c_r, |V_r||G_r|) per residue r and the cell count M on the common grid."""
    if f.origin != g.origin:
        raise DomainError(f"grid mismatch: origins {f.origin} and {g.origin}")
    depth = max(f.depth, g.depth)
    fv = _flat_values(f.upsample(depth))
    gv = _flat_values(g.upsample(depth))
    cells = 1 << depth
    spec_f = np.fft.fft(fv, axis=0)
    spec_g = np.fft.fft(gv, axis=0)
    r = np.arange(cells)
    weight = np.sin(np.pi * r / cells) ** 2
    coeffs = np.imag(spec_f * np.conj(spec_g)).sum(axis=1) * weight
    sizes = (np.abs(spec_f) * np.abs(spec_g)).sum(axis=1) * weight
    return coeffs, sizes, cells


def circle_tail_bound(f: PiecewiseFn, g: PiecewiseFn, terms: int) -> float:
    """Bound on the pairing terms with k > terms."""
    _, sizes, _ = _circle_spectra(f, g)
    return float(sizes.sum()) / (math.pi**2 * (terms + 1) ** 2)


def pairing_circle(
    f: PiecewiseFn,
    g: PiecewiseFn,
    terms: Optional[int] = None,
    tol: Optional[float] = None,
) -> float:
    """(H^T f, g) in L2(I, dx/|I|) for f, g on a common interval I.

    Args:
        f, g: Functions on the same origin
        terms: Truncation K; None sums the full series through trigamma values
        tol: Required accuracy of a truncated sum

    Raises:
        DomainError: If the origins differ
        TruncationError: If K cannot meet ``tol``; carries the K needed
    """
    coeffs, sizes, cells = _circle_spectra(f, g)
    if terms is None:
        r = np.arange(1, cells)
        exact = coeffs[1:] * polygamma(1, r / cells) / cells**2
        return float(2.0 / math.pi**2 * exact.sum())

    if terms < 2:
        raise DomainError(f"circle truncation needs K >= 2, got {terms}")
    bound = float(sizes.sum()) / (math.pi**2 * (terms + 1) ** 2)
    if tol is not None and bound > tol:
        required = math.ceil(math.sqrt(float(sizes.sum()) / (math.pi**2 * tol))) - 1
        raise TruncationError(terms, required, bound, tol)
    k = np.arange(1, terms + 1)
    series = coeffs[k % cells] / (k.astype(float) ** 2)
    return float(2.0 / math.pi**2 * series.sum())


# =============================================================================
# Constants and the kernel identity
# =============================================================================


def _haar(interval: DyadicInterval, origin: DyadicInterval) -> PiecewiseFn:
    return PiecewiseFn.haar(interval, depth=interval.level - origin.level + 1, origin=origin)


def compute_constants(tol: float = 1e-8, terms: Optional[int] = None) -> KernelConstants:
    """c0 = (H^R 1_{I0+}, 1_{I0-}), c1 = (H^T h_{I0}, h_{I0+}), c2 = (H^T h_{I0+}, h_{I0-}).

    c1 and c2 come from the exact trigamma sum; their errors are the
    differences between truncations at K and 4K.

    Raises:
        DomainError: If tol < 1e-8 or c1 vanishes
    """
    if tol < 1e-8:
        raise DomainError(f"tol must be >= 1e-8, got {tol}")
    terms = get_settings().circle_terms if terms is None else terms
    root = DyadicInterval.root()
    h0, h_minus, h_plus = _haar(root, root), _haar(root.minus, root), _haar(root.plus, root)

    c0 = pairing_line(PiecewiseFn.indicator(root.plus), PiecewiseFn.indicator(root.minus))
    c1 = pairing_circle(h0, h_plus)
    c2 = pairing_circle(h_plus, h_minus)
    c1_error = abs(pairing_circle(h0, h_plus, terms) - pairing_circle(h0, h_plus, 4 * terms))
    c2_error = abs(
        pairing_circle(h_plus, h_minus, terms) - pairing_circle(h_plus, h_minus, 4 * terms)
    )
    rotation = abs(c1 + pairing_circle(h0, h_minus))
    if abs(c1) <= tol:
        raise DomainError(f"c1 = {c1:.3e} vanishes to tolerance {tol:.1e}")
    constants = KernelConstants(
        c0=c0,
        c1=c1,
        c2=c2,
        c0_method="closed-form",
        c1_method="trigamma",
        c2_method="trigamma",
        c1_error=c1_error,
        c2_error=c2_error,
        c1_rotation_error=rotation,
    )
    logger.info(
        "Kernel constants: c0=%.12f c1=%.12f (+-%.1e) c2=%.12f (+-%.1e)",
        c0,
        c1,
        c1_error,
        c2,
        c2_error,
    )
    return constants


def htvsdyadic_check(
    interval: DyadicInterval,
    f: PiecewiseFn,
    g: PiecewiseFn,
    constants: KernelConstants,
    terms: Optional[int] = None,
) -> KernelIdentityCheck:
    """Compare (H^T_I f, g) with (H^dy f, g) for f, g in Ran Delta^2_I.

    Both sides use the measure dx/|I|. The 3x3 matrix of the circle form in
    the basis (h_I, h_{I-}, h_{I+}) is checked against
    [[0, c1, -c1], [-c1, 0, c2], [c1, -c2, 0]], entry (i, j) = (H e_j, e_i).

    Raises:
        DomainError: If the interval is at an even level or f, g are on another origin
    """
    if interval.level % 2 == 0:
        raise DomainError(f"{interval} is at an even level; the odd shift acts at odd levels")
    if f.origin != interval or g.origin != interval:
        raise DomainError("f and g must be given on the interval itself")
    in_range = in_range_delta2(f, interval) and in_range_delta2(g, interval)

    length = 2.0**-interval.level
    lhs = pairing_circle(f, g, terms)
    hdy_f = apply_shift(ShiftKind.HDY, f, constants=constants)
    depth = max(hdy_f.depth, g.depth)
    rhs = float(
        np.einsum("nk,nk->", _flat_values(hdy_f.upsample(depth)), _flat_values(g.upsample(depth)))
    ) * (2.0 ** -(interval.level + depth)) / length

    basis = [_haar(J, interval) for J in (interval, interval.minus, interval.plus)]
    c1, c2 = constants.c1, constants.c2
    expected = np.array([[0.0, c1, -c1], [-c1, 0.0, c2], [c1, -c2, 0.0]]) / length
    measured = np.array([[pairing_circle(ej, ei, terms) for ej in basis] for ei in basis])
    matrix_error = float(np.abs(measured - expected).max()) * length
    return KernelIdentityCheck(interval.level, lhs, rhs, matrix_error, in_range)
