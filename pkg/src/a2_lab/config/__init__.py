# Author: Green Mountain Systems AI Inc.

"""Configuration module."""

from .run_file import load_run_file
from .settings import LabSettings, get_settings

__all__ = ["LabSettings", "get_settings", "load_run_file"]
