# Author: Green Mountain Systems AI Inc.

"""Experiment specifications and results.

``ExperimentSpec`` is what the CLI and run files produce; grid fields left
unset fall back to the defaults of the named experiment.
"""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .core import EvaluatorKind, ExperimentName, SeedConvention, WitnessChoice


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        parts = [p.strip() for p in value.split(",")]
        return [p for p in parts if p]
    return value


class ExperimentSpec(BaseModel):
    """One run of a named experiment."""

    model_config = ConfigDict(frozen=True)

    experiment: ExperimentName
    q_grid: Optional[list[float]] = Field(default=None, description="Q values, in run order")
    delta0: Optional[float] = Field(default=None, gt=0.0, le=0.1)
    nmax: Optional[int] = Field(default=None, ge=0)
    witness: WitnessChoice = WitnessChoice.A0
    evaluator: EvaluatorKind = EvaluatorKind.FRAME_RECURSION
    frequencies: Optional[list[int]] = Field(default=None, description="N vector family")
    out: str = "results"
    seed: int = 20240101
    tol: float = Field(default=1e-9, gt=0.0)
    depth: Optional[int] = Field(default=None, ge=1, description="Working depth")
    rounds: Optional[int] = Field(default=None, ge=0, description="Remodel repair rounds")
    rotate: bool = True
    convention: SeedConvention = SeedConvention.SYMMETRIC

    @field_validator("q_grid", "frequencies", mode="before")
    @classmethod
    def _parse_list(cls, value: Any) -> Any:
        return _split_list(value)

    @field_validator("q_grid")
    @classmethod
    def _check_q_grid(cls, value: Optional[list[float]]) -> Optional[list[float]]:
        if value is None:
            return value
        if not value:
            raise ValueError("q_grid must not be empty")
        if any(q < 1.0 for q in value):
            raise ValueError(f"every Q must be >= 1, got {value}")
        return value

    @field_validator("frequencies")
    @classmethod
    def _check_frequencies(cls, value: Optional[list[int]]) -> Optional[list[int]]:
        if value is None:
            return value
        if not value:
            raise ValueError("frequencies must not be empty")
        if any(n < 2 for n in value):
            raise ValueError(f"every frequency must be >= 2, got {value}")
        return value

    def echo(self) -> dict[str, Any]:
        """The run parameters as JSON-ready values."""
        return self.model_dump(mode="json")


class ExperimentResult(BaseModel):
    """Rows, fits and acceptance checks of one run."""

    experiment: ExperimentName
    spec: dict[str, Any] = Field(default_factory=dict)
    rows: list[dict[str, Any]] = Field(default_factory=list)
    fits: dict[str, dict[str, Any]] = Field(default_factory=dict)
    checks: dict[str, bool] = Field(default_factory=dict)
    summary: dict[str, Any] = Field(default_factory=dict)
    plot_rows: list[dict[str, Any]] = Field(default_factory=list)
    tables: dict[str, list[dict[str, str]]] = Field(
        default_factory=dict, description="Extra CSV tables by file stem"
    )
    runtime_s: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def failed_checks(self) -> list[str]:
        return [name for name, ok in self.checks.items() if not ok]

    def check(self, name: str, ok: bool) -> bool:
        self.checks[name] = bool(ok)
        return bool(ok)

    def errors(self) -> list[str]:
        return [str(row["error"]) for row in self.rows if row.get("error")]
