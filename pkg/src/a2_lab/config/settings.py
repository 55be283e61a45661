# Author: Green Mountain Systems AI Inc.

"""Configuration settings for the Matrix A2 Lab."""

import math
from functools import lru_cache

from dotenv import find_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

# Find .env file by searching up from current working directory
_ENV_FILE = find_dotenv(usecwd=True)


class LabSettings(BaseSettings):
    """Lab settings loaded from environment variables (prefix ``A2_LAB_``)."""

    model_config = SettingsConfigDict(
        env_prefix="A2_LAB_",
        env_file=_ENV_FILE if _ENV_FILE else None,
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Materialization
    depth_cap: int = 24  # max depth of any leaf array
    remodel_depth: int = 14  # first-pass grid cap for remodeling
    repair_rounds: int = 8

    # Construction
    q: float = 0.1
    delta0_cap: float = 1e-3
    delta0_scale: float = 0.05  # delta0 = min(delta0_cap, delta0_scale / sqrt(Q))
    nmax_factor: float = 16.0  # n_max = ceil(nmax_factor * Q)

    # Numerics
    psd_tol: float = 1e-12
    circle_terms: int = 2**20
    pair_budget: int = 2**22
    store_pair_cap: int = 4096
    random_tests: int = 64
    seed: int = 20240101
    workers: int = 1  # threads over grid points

    # Output
    out_dir: str = "results"
    store_type: str = "filesystem"  # filesystem, memory
    log_level: str = "INFO"

    def default_delta0(self, Q: float) -> float:
        """Initial rotation parameter used when a run does not fix one."""
        return min(self.delta0_cap, self.delta0_scale / math.sqrt(Q))

    def default_nmax(self, Q: float) -> int:
        """Number of stopping generations used when a run does not fix one."""
        return math.ceil(self.nmax_factor * Q)


@lru_cache
def get_settings() -> LabSettings:
    """Get cached settings instance."""
    return LabSettings()
