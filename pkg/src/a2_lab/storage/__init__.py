# Author: Green Mountain Systems AI Inc.

"""Result stores for the Matrix A2 Lab.

Supports a filesystem directory (default) and an in-memory store.
"""

from .base import ResultStore
from .factory import get_result_store

__all__ = ["ResultStore", "get_result_store"]
