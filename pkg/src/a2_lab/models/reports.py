# Author: Green Mountain Systems AI Inc.

"""Result records returned by the engines.

Plain dataclasses: engines fill them, experiments flatten them into CSV rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from .core import EvaluatorKind


@dataclass
class CheckResult:
    """Outcome of one named invariant check."""

    name: str
    passed: bool
    worst: float  # worst observed value of the checked quantity
    detail: str = ""


@dataclass
class ModelCheckReport:
    """All invariant checks of one constructed weight model."""

    Q: float
    n_max: int
    checks: dict[str, CheckResult] = field(default_factory=dict)

    def add(self, name: str, passed: bool, worst: float, detail: str = "") -> None:
        self.checks[name] = CheckResult(name, bool(passed), float(worst), detail)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failed(self) -> list[str]:
        return [name for name, c in self.checks.items() if not c.passed]


@dataclass
class QuadraticFormReport:
    """||Pi f||^2_{L2(W)} split into diagonal and off-diagonal parts.

    ``offdiag`` is the sum over ordered pairs J strictly inside I, so
    total = diagonal + 2 * offdiag.
    """

    method: EvaluatorKind
    diagonal: float
    offdiag: float
    norm_f_sq: float  # ||f||^2_{L2(W)} = (b, <W^-1>_{I0} b)
    pairs: dict[tuple[int, int], float] = field(default_factory=dict)  # (n, k) -> off-diagonal mass
    runtime_ms: float = 0.0

    @property
    def total(self) -> float:
        return self.diagonal + 2.0 * self.offdiag

    @property
    def ratio(self) -> float:
        """||Pi f|| / ||f||."""
        return (self.total / self.norm_f_sq) ** 0.5

    @property
    def offdiag_ratio(self) -> float:
        """sqrt(2 * offdiag) / ||f||, the rotation-driven part."""
        return (max(2.0 * self.offdiag, 0.0) / self.norm_f_sq) ** 0.5

    @property
    def diagonal_ratio(self) -> float:
        return (self.diagonal / self.norm_f_sq) ** 0.5


@dataclass
class PiPiStarReport:
    """Term groups of -(Pi f, Pi* f)_{L2(W)} and the related norms.

    -(Pi f, Pi* f) = diagonal + minus_half + plus_half + crossed, where each
    group carries the sign it has in that expansion.
    """

    diagonal: float  # -sum (<W h_I> <W^-1 h_I> b, <W^-1>_I b)|I|
    minus_half: float  # +sum over J in the minus half of I
    plus_half: float  # -sum over J in the plus half of I
    crossed: float  # -sum (<W^-1 h_I> b, <W h_J> <W^-1>_J b)|J|
    pi_norm_sq: float
    pistar_norm_sq: float

    @property
    def pairing(self) -> float:
        """(Pi f, Pi* f)_{L2(W)}."""
        return -(self.diagonal + self.minus_half + self.plus_half + self.crossed)

    @property
    def difference_norm_sq(self) -> float:
        """||(Pi - Pi*) f||^2 = ||Pi f||^2 - 2 (Pi f, Pi* f) + ||Pi* f||^2."""
        return self.pi_norm_sq - 2.0 * self.pairing + self.pistar_norm_sq

    def signs(self) -> dict[str, int]:
        groups = {
            "diagonal": self.diagonal,
            "minus_half": self.minus_half,
            "plus_half": self.plus_half,
            "crossed": self.crossed,
        }
        return {name: (value > 0) - (value < 0) for name, value in groups.items()}


@dataclass
class DiagnosticsRecord:
    """Main term and residual of one (I, J) off-diagonal term."""

    n: int
    k: int
    s_J: float
    t_J: float
    sigma_I: float
    tau_I: float
    term: float  # (<W h_J>_J <W^-1>_J b, <W^-1>_I b)
    main_term: float  # -alpha_n t_k (a_I, b)^2 (a_I, b_J)
    residual: float
    scale: float  # alpha_n t_k delta_n^2
    t_over_t_tilde: float
    stop_diff_error: float = 0.0  # relative error of the stopping-neighbour difference
    terminal_diff_error: float = 0.0  # relative error of the terminal-neighbour difference
    even_coupling: float = 0.0  # A_{I,J}
    even_coupling_bound: float = 0.0  # q^2 Q delta0 alpha0

    @property
    def constant(self) -> float:
        """|residual| / (alpha_n t_k delta_n^2)."""
        return abs(self.residual) / self.scale if self.scale > 0 else 0.0


@dataclass
class KernelConstants:
    """The Hilbert transform constants with their error bars."""

    c0: float
    c1: float
    c2: float
    c0_method: str = "closed-form"
    c1_method: str = ""
    c2_method: str = ""
    c1_error: float = 0.0
    c2_error: float = 0.0
    c1_rotation_error: float = 0.0  # |c1 + (H h_I0, h_I0-)|


@dataclass
class KernelIdentityCheck:
    """Circle Hilbert transform against H^dy on Ran Delta^2_I."""

    level: int
    lhs: float  # (H^T_I f, g) in L2(I, dx/|I|)
    rhs: float  # (H^dy f, g) in the same measure
    matrix_error: float  # worst entry error of the 3x3 coefficient matrix
    in_range: bool

    @property
    def deviation(self) -> float:
        return abs(self.lhs - self.rhs)


@dataclass
class TrendRow:
    """One frequency of a transference trend."""

    N: int
    lhs: float
    rhs: float
    leakage: Optional[float] = None

    @property
    def abs_err(self) -> float:
        return abs(self.lhs - self.rhs)


@dataclass
class TrendReport:
    rows: list[TrendRow] = field(default_factory=list)

    def errors(self) -> list[float]:
        return [row.abs_err for row in self.rows]

    def strictly_decreasing(self, values: list[float]) -> bool:
        return all(b < a for a, b in zip(values, values[1:]))


@dataclass
class ExponentFit:
    """Least squares fit of ln y = slope ln x + intercept."""

    slope: float
    intercept: float
    ci_low: float
    ci_high: float
    stderr: float
    points: int

    def as_dict(self) -> dict[str, Any]:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "stderr": self.stderr,
            "points": self.points,
        }
