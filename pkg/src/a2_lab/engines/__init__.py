# Author: Green Mountain Systems AI Inc.

"""Numerical engines of the Matrix A2 Lab."""

from .experiments import run
from .weight_forge import WeightModel, build_weight, verify_model

__all__ = ["WeightModel", "build_weight", "run", "verify_model"]
