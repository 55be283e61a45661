# Author: Green Mountain Systems AI Inc.

"""Extended-range reals.

Eigenvalues of the construction grow like r**n with r close to 2 and shrink
like r**-n, so a few thousand generations leave the double range. A
``ScaledReal`` keeps a float mantissa in [0.5, 1) and an unbounded integer
binary exponent, the same layout ``math.frexp`` produces.
"""

from __future__ import annotations

import math
from typing import Union

_LOG10_2 = math.log10(2.0)

Number = Union[int, float, "ScaledReal"]


class ScaledReal:
    """A real number ``mant * 2**exp`` with an unbounded exponent."""

    __slots__ = ("mant", "exp")

    def __init__(self, mant: float = 0.0, exp: int = 0) -> None:
        if not math.isfinite(mant):
            raise ValueError(f"ScaledReal mantissa must be finite, got {mant}")
        m, e = math.frexp(mant)
        self.mant = m
        self.exp = e + exp if m != 0.0 else 0

    # ===== Construction / conversion =====

    @classmethod
    def of(cls, value: Number) -> ScaledReal:
        """Coerce a float, int or ScaledReal."""
        if isinstance(value, ScaledReal):
            return value
        return cls(float(value))

    @classmethod
    def from_log2(cls, log2_value: float) -> ScaledReal:
        """The positive number 2**log2_value."""
        whole = math.floor(log2_value)
        return cls(2.0 ** (log2_value - whole), whole)

    def to_float(self) -> float:
        """Nearest double; overflow saturates to +/-inf and underflow to 0."""
        try:
            return math.ldexp(self.mant, self.exp)
        except OverflowError:
            return math.copysign(math.inf, self.mant)

    def __float__(self) -> float:
        return self.to_float()

    def log2(self) -> float:
        if self.mant <= 0.0:
            raise ValueError("log2 of a nonpositive ScaledReal")
        return math.log2(self.mant) + self.exp

    def log(self) -> float:
        return self.log2() * math.log(2.0)

    def sqrt(self) -> ScaledReal:
        if self.mant < 0.0:
            raise ValueError("sqrt of a negative ScaledReal")
        if self.mant == 0.0:
            return ScaledReal()
        if self.exp % 2:
            return ScaledReal(math.sqrt(self.mant * 2.0), (self.exp - 1) // 2)
        return ScaledReal(math.sqrt(self.mant), self.exp // 2)

    def is_zero(self) -> bool:
        return self.mant == 0.0

    def sign(self) -> int:
        return (self.mant > 0.0) - (self.mant < 0.0)

    # ===== Arithmetic =====

    def _align(self, other: Number) -> tuple[float, float, int]:
        o = ScaledReal.of(other)
        ss, se, os_, oe = self.mant, self.exp, o.mant, o.exp
        if ss == 0.0:
            return 0.0, os_, oe
        if os_ == 0.0:
            return ss, 0.0, se
        if se >= oe:
            return ss, math.ldexp(os_, oe - se), se
        return math.ldexp(ss, se - oe), os_, oe

    def __add__(self, other: Number) -> ScaledReal:
        a, b, e = self._align(other)
        return ScaledReal(a + b, e)

    __radd__ = __add__

    def __sub__(self, other: Number) -> ScaledReal:
        a, b, e = self._align(other)
        return ScaledReal(a - b, e)

    def __rsub__(self, other: Number) -> ScaledReal:
        return ScaledReal.of(other) - self

    def __mul__(self, other: Number) -> ScaledReal:
        o = ScaledReal.of(other)
        return ScaledReal(self.mant * o.mant, self.exp + o.exp)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> ScaledReal:
        o = ScaledReal.of(other)
        if o.mant == 0.0:
            raise ZeroDivisionError("ScaledReal division by zero")
        return ScaledReal(self.mant / o.mant, self.exp - o.exp)

    def __rtruediv__(self, other: Number) -> ScaledReal:
        return ScaledReal.of(other) / self

    def __neg__(self) -> ScaledReal:
        return ScaledReal(-self.mant, self.exp)

    def __abs__(self) -> ScaledReal:
        return ScaledReal(abs(self.mant), self.exp)

    def __pow__(self, power: int) -> ScaledReal:
        result = ScaledReal(1.0)
        base = self if power >= 0 else ScaledReal(1.0) / self
        for _ in range(abs(power)):
            result = result * base
        return result

    # ===== Comparison =====

    def _cmp(self, other: Number) -> float:
        a, b, _ = self._align(other)
        return a - b

    def __lt__(self, other: Number) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: Number) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: Number) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: Number) -> bool:
        return self._cmp(other) >= 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (int, float, ScaledReal)):
            return NotImplemented
        return self._cmp(other) == 0

    def __hash__(self) -> int:
        return hash((self.mant, self.exp))

    def rel_diff(self, other: Number) -> float:
        """|self - other| / max(|self|, |other|), 0 when both vanish."""
        o = ScaledReal.of(other)
        scale = max(abs(self), abs(o))
        if scale.is_zero():
            return 0.0
        return (abs(self - o) / scale).to_float()

    # ===== Display =====

    def __repr__(self) -> str:
        return f"ScaledReal({self})"

    def __str__(self) -> str:
        if self.mant == 0.0:
            return "0"
        log10 = math.log10(abs(self.mant)) + self.exp * _LOG10_2
        e10 = math.floor(log10)
        digits = 10.0 ** (log10 - e10)
        if digits >= 9.9999995:
            digits, e10 = 1.0, e10 + 1
        sign = "-" if self.mant < 0 else ""
        return f"{sign}{digits:.6f}e{e10:+d}"
