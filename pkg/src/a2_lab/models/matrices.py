# Author: Green Mountain Systems AI Inc.

"""2x2 symmetric matrix value types.

``SymMat2`` stores the three independent entries of a real symmetric
matrix. ``Spectral2`` stores the same kind of matrix as an eigenframe angle
plus two eigenvalues in extended range, which is how node averages of the
constructed weight are kept:

    lam_a * a a^T + lam_b * b b^T,   a = (cos phi, sin phi), b = (-sin phi, cos phi)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .scaled import ScaledReal

Scalar = Union[int, float, ScaledReal]


@dataclass(frozen=True)
class SymMat2:
    """Real symmetric 2x2 matrix [[a11, a12], [a12, a22]]."""

    a11: float
    a12: float
    a22: float

    # ===== Constructors =====

    @classmethod
    def identity(cls, scale: float = 1.0) -> SymMat2:
        return cls(scale, 0.0, scale)

    @classmethod
    def diag(cls, d1: float, d2: float) -> SymMat2:
        return cls(d1, 0.0, d2)

    @classmethod
    def from_array(cls, m: np.ndarray) -> SymMat2:
        """Symmetric part of a 2x2 array."""
        return cls(float(m[0, 0]), 0.5 * float(m[0, 1] + m[1, 0]), float(m[1, 1]))

    def to_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a12, self.a22]])

    # ===== Scalar invariants =====

    @property
    def trace(self) -> float:
        return self.a11 + self.a22

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a12

    def eigenvalues(self) -> tuple[float, float]:
        """(largest, smallest) eigenvalue."""
        half_trace = 0.5 * self.trace
        radius = math.hypot(0.5 * (self.a11 - self.a22), self.a12)
        return half_trace + radius, half_trace - radius

    def norm(self) -> float:
        """Spectral norm."""
        big, small = self.eigenvalues()
        return max(abs(big), abs(small))

    def is_positive_definite(self) -> bool:
        return self.a11 > 0.0 and self.det > 0.0

    # ===== Algebra =====

    def __add__(self, other: SymMat2) -> SymMat2:
        return SymMat2(self.a11 + other.a11, self.a12 + other.a12, self.a22 + other.a22)

    def __sub__(self, other: SymMat2) -> SymMat2:
        return SymMat2(self.a11 - other.a11, self.a12 - other.a12, self.a22 - other.a22)

    def scale(self, factor: float) -> SymMat2:
        return SymMat2(factor * self.a11, factor * self.a12, factor * self.a22)

    def inverse(self) -> SymMat2:
        d = self.det
        if d == 0.0:
            raise ZeroDivisionError("singular SymMat2")
        return SymMat2(self.a22 / d, -self.a12 / d, self.a11 / d)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return np.array([self.a11 * x[0] + self.a12 * x[1], self.a12 * x[0] + self.a22 * x[1]])

    def congruence(self, s: SymMat2) -> SymMat2:
        """s @ self @ s for symmetric s."""
        return SymMat2.from_array(s.to_array() @ self.to_array() @ s.to_array())

    def allclose(self, other: SymMat2, rtol: float = 1e-12) -> bool:
        scale = max(self.norm(), other.norm(), np.finfo(float).tiny)
        return (self - other).norm() <= rtol * scale


@dataclass(frozen=True)
class Spectral2:
    """Positive symmetric 2x2 matrix held as a frame angle and two eigenvalues."""

    phi: float
    lam_a: ScaledReal
    lam_b: ScaledReal

    @classmethod
    def build(cls, phi: float, lam_a: Scalar, lam_b: Scalar) -> Spectral2:
        a, b = ScaledReal.of(lam_a), ScaledReal.of(lam_b)
        if a.sign() <= 0 or b.sign() <= 0:
            raise ValueError(f"Spectral2 eigenvalues must be positive, got {a}, {b}")
        return cls(phi, a, b)

    @classmethod
    def from_sym(cls, m: SymMat2) -> Spectral2:
        """Eigen-decompose a positive definite SymMat2; lam_a is the larger eigenvalue."""
        big, small = m.eigenvalues()
        phi = 0.5 * math.atan2(2.0 * m.a12, m.a11 - m.a22)
        return cls.build(phi, big, small)

    @property
    def a(self) -> np.ndarray:
        return np.array([math.cos(self.phi), math.sin(self.phi)])

    @property
    def b(self) -> np.ndarray:
        return np.array([-math.sin(self.phi), math.cos(self.phi)])

    def to_sym(self) -> SymMat2:
        la, lb = self.lam_a.to_float(), self.lam_b.to_float()
        c, s = math.cos(self.phi), math.sin(self.phi)
        return SymMat2(la * c * c + lb * s * s, (la - lb) * c * s, la * s * s + lb * c * c)

    def scale(self, factor: Scalar) -> Spectral2:
        return Spectral2(self.phi, self.lam_a * factor, self.lam_b * factor)

    def rotate(self, angle: float) -> Spectral2:
        return Spectral2(self.phi + angle, self.lam_a, self.lam_b)

    def inverse(self) -> Spectral2:
        return Spectral2(self.phi, 1 / self.lam_a, 1 / self.lam_b)

    def eccentricity(self) -> ScaledReal:
        return self.lam_a / self.lam_b

    def pair_char(self, other: Spectral2) -> float:
        """||self^{1/2} other^{1/2}||^2 for a pair sharing one frame.

        Products are formed in extended range, so the value stays exact when the
        eigenvalues themselves are far outside the double range.
        """
        if abs(math.remainder(self.phi - other.phi, math.pi)) > 1e-15:
            raise ValueError("pair_char needs a common frame; use mat2.a2_pair_char")
        return max(self.lam_a * other.lam_a, self.lam_b * other.lam_b).to_float()
