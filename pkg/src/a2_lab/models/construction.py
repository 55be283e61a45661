# Author: Green Mountain Systems AI Inc.

"""Construction parameters, per-generation eigenvalue tables and tree nodes.

Naming follows the construction: for a stopping interval of generation n
the inverse weight average is ``alpha a a^T + beta b b^T`` and the weight
average is ``beta_sharp a a^T + alpha_sharp b b^T``; the ``tilde`` columns
are the eigenvalues after the rotation step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .core import NodeKind, SeedConvention
from .dyadic import DyadicInterval
from .matrices import Spectral2
from .scaled import ScaledReal


class ConstructionParams(BaseModel):
    """Parameters of one member W_{Q, delta0} of the weight family."""

    model_config = ConfigDict(frozen=True)

    Q: float = Field(..., ge=1.0, description="Target dyadic A2 characteristic")
    delta0: float = Field(..., gt=0.0, le=0.1, description="Initial rotation parameter")
    q: float = Field(default=0.1, gt=0.0, lt=1.0, description="Fixed small parameter")
    n_max: int = Field(..., ge=0, description="Number of stopping generations")
    convention: SeedConvention = Field(default=SeedConvention.SYMMETRIC)
    alpha0: float = Field(default=1.0, gt=0.0, description="alpha_0 for the alpha0-fixed convention")
    rotate: bool = Field(default=True, description="False builds the q = 0 control")

    @model_validator(mode="after")
    def _check_seed_order(self) -> ConstructionParams:
        # beta0 / alpha0 = (delta0 / q)**2 must stay below 1
        if self.delta0 >= self.q:
            raise ValueError(f"delta0={self.delta0} must be smaller than q={self.q}")
        return self

    @property
    def r(self) -> float:
        """Stretching parameter 2 - 1/Q."""
        return 2.0 - 1.0 / self.Q

    @property
    def effective_q(self) -> float:
        return self.q if self.rotate else 0.0

    def seeds(self) -> tuple[ScaledReal, ScaledReal, ScaledReal, ScaledReal]:
        """(alpha0, beta0, alpha0_sharp, beta0_sharp) for the chosen convention."""
        Q, q, d0 = self.Q, self.q, self.delta0
        if self.convention == SeedConvention.SYMMETRIC:
            alpha = ScaledReal(q / d0 * math.sqrt(Q))
            beta = ScaledReal(d0 / q * math.sqrt(Q))
            return alpha, beta, alpha, beta
        alpha = ScaledReal(self.alpha0)
        beta = alpha * (d0 * d0 / (q * q))
        beta_sharp = ScaledReal(Q) / alpha
        alpha_sharp = ScaledReal(Q) / beta
        return alpha, beta, alpha_sharp, beta_sharp


EIGEN_COLUMNS = (
    "alpha",
    "beta",
    "alpha_sharp",
    "beta_sharp",
    "tilde_alpha",
    "tilde_beta",
    "tilde_alpha_sharp",
    "tilde_beta_sharp",
    "delta",
    "t",
    "t_tilde",
)


@dataclass
class EigenTable:
    """Per-generation eigenvalue data for generations 0..n_max.

    Every ScaledReal column has one entry per generation; ``theta`` and ``s``
    are plain floats since they stay in (0, pi/4) and (0.9, 1].
    """

    alpha: list[ScaledReal] = field(default_factory=list)
    beta: list[ScaledReal] = field(default_factory=list)
    alpha_sharp: list[ScaledReal] = field(default_factory=list)
    beta_sharp: list[ScaledReal] = field(default_factory=list)
    tilde_alpha: list[ScaledReal] = field(default_factory=list)
    tilde_beta: list[ScaledReal] = field(default_factory=list)
    tilde_alpha_sharp: list[ScaledReal] = field(default_factory=list)
    tilde_beta_sharp: list[ScaledReal] = field(default_factory=list)
    delta: list[ScaledReal] = field(default_factory=list)
    theta: list[float] = field(default_factory=list)
    s: list[float] = field(default_factory=list)
    t: list[ScaledReal] = field(default_factory=list)
    t_tilde: list[ScaledReal] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.alpha)

    @property
    def ratio(self) -> ScaledReal:
        """c = alpha0_sharp / alpha0."""
        return self.alpha_sharp[0] / self.alpha[0]

    def m(self, n: int) -> ScaledReal:
        """Coefficient of <W h_J>_J = -m_n K_J for J in S_n."""
        d = self.delta[n]
        return d * (self.tilde_alpha_sharp[n] - self.tilde_beta_sharp[n]) / (1 + d * d)

    def n_coef(self, n: int) -> ScaledReal:
        """Coefficient of <W^-1 h_J>_J = +n_n K_J for J in S_n."""
        d = self.delta[n]
        return d * (self.tilde_alpha[n] - self.tilde_beta[n]) / (1 + d * d)

    def terminal_product(self, n: int, r: float) -> float:
        """p_n = 2 s_n - 1/r, the A2 value of a terminal interval of generation n."""
        return 2.0 * self.s[n] - 1.0 / r

    def row(self, n: int) -> dict[str, str]:
        out = {"n": str(n)}
        for name in EIGEN_COLUMNS:
            out[name] = str(getattr(self, name)[n])
        out["theta"] = repr(self.theta[n])
        out["s"] = repr(self.s[n])
        return out

    def rows(self) -> list[dict[str, str]]:
        """CSV rows ordered by generation."""
        return [self.row(n) for n in range(len(self))]


@dataclass(frozen=True)
class NodeInfo:
    """One node of the constructed tree with its averages in a common frame."""

    path: str  # sign path from I0, '1' = plus child
    kind: NodeKind
    generation: int
    angle: float  # frame angle phi of a_I
    v: Spectral2  # <W^-1>_I
    w: Spectral2  # <W>_I
    leaf_sign: Optional[int] = None  # +1 / -1 for leaves

    @property
    def interval(self) -> DyadicInterval:
        return DyadicInterval.from_path(self.path)

    @property
    def a2(self) -> float:
        """||<W^-1>^{1/2} <W>^{1/2}||^2; both averages share the frame ``angle``."""
        return self.v.pair_char(self.w)
