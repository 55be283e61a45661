# Author: Green Mountain Systems AI Inc.

"""Pytest configuration and fixtures for Matrix A2 Lab tests."""

from typing import Generator

import numpy as np
import pytest

from a2_lab.config import get_settings
from a2_lab.engines.hilbert_kernels import compute_constants
from a2_lab.engines.weight_forge import WeightModel, build_weight
from a2_lab.models.construction import ConstructionParams
from a2_lab.models.dyadic import DyadicInterval, PiecewiseFn
from a2_lab.models.reports import KernelConstants


@pytest.fixture(autouse=True)
def fresh_settings() -> Generator[None, None, None]:
    """Drop cached settings so env changes in a test take effect."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded random generator."""
    return np.random.default_rng(20240101)


@pytest.fixture
def params_q4() -> ConstructionParams:
    """Small construction with Q = 4."""
    return ConstructionParams(Q=4.0, delta0=1e-2, n_max=3)


@pytest.fixture
def params_q16() -> ConstructionParams:
    """Small construction with Q = 16."""
    return ConstructionParams(Q=16.0, delta0=1e-3, n_max=4)


@pytest.fixture
def model_q4(params_q4: ConstructionParams) -> WeightModel:
    return build_weight(params_q4)


@pytest.fixture
def model_q16(params_q16: ConstructionParams) -> WeightModel:
    return build_weight(params_q16)


@pytest.fixture
def control_q16() -> WeightModel:
    """The q = 0 control at Q = 16."""
    return build_weight(ConstructionParams(Q=16.0, delta0=1e-3, n_max=4, rotate=False))


@pytest.fixture(scope="session")
def kernel_constants() -> KernelConstants:
    """Hilbert kernel constants at the default truncation."""
    return compute_constants()

@pytest.fixture
def root() -> DyadicInterval:
    return DyadicInterval.root()


@pytest.fixture
def random_fn(rng: np.random.Generator) -> PiecewiseFn:
    """Scalar function on I0 with 2**5 cells."""
    return PiecewiseFn(5, DyadicInterval.root(), rng.standard_normal(32))
