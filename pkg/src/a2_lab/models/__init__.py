# Author: Green Mountain Systems AI Inc.

"""Data models for the Matrix A2 Lab."""

from .bookkeeping import BookkeepingEntry, RemodelBookkeeping
from .construction import ConstructionParams, EigenTable, NodeInfo
from .core import (
    EvaluatorKind,
    ExperimentName,
    FamilyKind,
    IntervalRole,
    NodeKind,
    SeedConvention,
    ShiftKind,
    WitnessChoice,
)
from .dyadic import DyadicInterval, PiecewiseFn
from .experiment import ExperimentResult, ExperimentSpec
from .matrices import Spectral2, SymMat2
from .reports import (
    CheckResult,
    DiagnosticsRecord,
    ExponentFit,
    KernelConstants,
    KernelIdentityCheck,
    ModelCheckReport,
    PiPiStarReport,
    QuadraticFormReport,
    TrendReport,
    TrendRow,
)
from .scaled import ScaledReal

__all__ = [
    # Remodeling
    "BookkeepingEntry",
    "RemodelBookkeeping",
    # Construction
    "ConstructionParams",
    "EigenTable",
    "NodeInfo",
    # Enums
    "EvaluatorKind",
    "ExperimentName",
    "FamilyKind",
    "IntervalRole",
    "NodeKind",
    "SeedConvention",
    "ShiftKind",
    "WitnessChoice",
    # Dyadic
    "DyadicInterval",
    "PiecewiseFn",
    # Experiments
    "ExperimentResult",
    "ExperimentSpec",
    # Numbers and matrices
    "ScaledReal",
    "Spectral2",
    "SymMat2",
    # Reports
    "CheckResult",
    "DiagnosticsRecord",
    "ExponentFit",
    "KernelConstants",
    "KernelIdentityCheck",
    "ModelCheckReport",
    "PiPiStarReport",
    "QuadraticFormReport",
    "TrendReport",
    "TrendRow",
]
