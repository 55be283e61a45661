# Author: Green Mountain Systems AI Inc.

"""Closed-form 2x2 symmetric positive-definite linear algebra.

Scalar operations act on ``SymMat2``; the ``*_array`` helpers act on numpy
stacks of shape (..., 2, 2) and are what the grid engines call. Nothing here
iterates: square roots use

    sqrt(M) = (M + sqrt(det M) I) / sqrt(tr M + 2 sqrt(det M))
"""

import logging
import math

import numpy as np

from ..config import get_settings
from ..errors import DomainError
from ..models.matrices import SymMat2

logger = logging.getLogger(__name__)


def _require_pd(m: SymMat2, name: str) -> None:
    if not m.is_positive_definite():
        raise DomainError(f"{name} is not positive definite: {m}")


def sqrtm(m: SymMat2) -> SymMat2:
    """Principal square root of a positive semidefinite SymMat2."""
    root_det = math.sqrt(max(m.det, 0.0))
    denom_sq = m.trace + 2.0 * root_det
    if denom_sq <= 0.0:
        return SymMat2(0.0, 0.0, 0.0)
    denom = math.sqrt(denom_sq)
    return SymMat2((m.a11 + root_det) / denom, m.a12 / denom, (m.a22 + root_det) / denom)


def a2_pair_char(v: SymMat2, w: SymMat2) -> float:
    """A2 characteristic of a pair: ||v^{1/2} w^{1/2}||^2.

    This is the largest eigenvalue of w^{1/2} v w^{1/2}, which shares its
    spectrum with v w; the roots come from the characteristic polynomial
    lambda^2 - tr(v w) lambda + det(v) det(w).

    Raises:
        DomainError: If either matrix is not positive definite
    """
    _require_pd(v, "v")
    _require_pd(w, "w")
    half_trace = 0.5 * (v.a11 * w.a11 + 2.0 * v.a12 * w.a12 + v.a22 * w.a22)
    det = v.det * w.det
    return half_trace + math.sqrt(max(half_trace * half_trace - det, 0.0))


def loewner_leq(a: SymMat2, b: SymMat2, tol: float | None = None) -> bool:
    """True iff b - a is positive semidefinite up to a relative eigenvalue tolerance."""
    tol = get_settings().psd_tol if tol is None else tol
    scale = max(a.norm(), b.norm(), np.finfo(float).tiny)
    return (b - a).eigenvalues()[1] >= -tol * scale


def terminal_children(
    w: SymMat2, v: SymMat2, tol: float | None = None
) -> tuple[SymMat2, SymMat2]:
    """Split an average pair (w, v) into two children with exact inverse values.

    With M = w^{1/2} v w^{1/2} and Delta = (I - M^{-1})^{1/2} the children are
    W+- = w^{1/2} (I +- Delta) w^{1/2}. Their mean is w and the mean of their
    inverses is v.

    Args:
        w: Average of the weight on the parent
        v: Average of the inverse weight on the parent
        tol: Tolerance for the precondition v^{-1} <= w

    Returns:
        (W_plus, W_minus)

    Raises:
        DomainError: If I - M^{-1} has an eigenvalue below -tol
    """
    tol = get_settings().psd_tol if tol is None else tol
    _require_pd(w, "w")
    _require_pd(v, "v")
    root_w = sqrtm(w)
    m = v.congruence(root_w)
    delta_sq = SymMat2.identity() - m.inverse()
    big, small = delta_sq.eigenvalues()
    if small < -tol * max(1.0, abs(big)):
        raise DomainError(
            f"terminal split needs v^-1 <= w; I - M^-1 has eigenvalue {small:.3e}"
        )
    delta = sqrtm(delta_sq)
    plus = (SymMat2.identity() + delta).congruence(root_w)
    minus = (SymMat2.identity() - delta).congruence(root_w)
    return plus, minus


# ===== Vectorized helpers over (..., 2, 2) stacks =====


def sym_array(a11: np.ndarray, a12: np.ndarray, a22: np.ndarray) -> np.ndarray:
    """Stack entry arrays into (..., 2, 2) symmetric matrices."""
    out = np.empty(np.shape(a11) + (2, 2))
    out[..., 0, 0] = a11
    out[..., 0, 1] = a12
    out[..., 1, 0] = a12
    out[..., 1, 1] = a22
    return out


def frame_array(phi: np.ndarray, lam_a: np.ndarray, lam_b: np.ndarray) -> np.ndarray:
    """lam_a a a^T + lam_b b b^T for arrays of angles and eigenvalues."""
    c, s = np.cos(phi), np.sin(phi)
    return sym_array(lam_a * c * c + lam_b * s * s, (lam_a - lam_b) * c * s, lam_a * s * s + lam_b * c * c)


def det_array(m: np.ndarray) -> np.ndarray:
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def inv_array(m: np.ndarray) -> np.ndarray:
    d = det_array(m)
    return sym_array(m[..., 1, 1] / d, -m[..., 0, 1] / d, m[..., 0, 0] / d)


def sqrtm_array(m: np.ndarray) -> np.ndarray:
    root_det = np.sqrt(np.maximum(det_array(m), 0.0))
    denom = np.sqrt(np.maximum(m[..., 0, 0] + m[..., 1, 1] + 2.0 * root_det, np.finfo(float).tiny))
    return sym_array(
        (m[..., 0, 0] + root_det) / denom, m[..., 0, 1] / denom, (m[..., 1, 1] + root_det) / denom
    )


def a2_char_array(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Elementwise a2_pair_char over stacks of positive definite pairs."""
    half_trace = 0.5 * (
        v[..., 0, 0] * w[..., 0, 0] + 2.0 * v[..., 0, 1] * w[..., 0, 1] + v[..., 1, 1] * w[..., 1, 1]
    )
    det = det_array(v) * det_array(w)
    return half_trace + np.sqrt(np.maximum(half_trace * half_trace - det, 0.0))
