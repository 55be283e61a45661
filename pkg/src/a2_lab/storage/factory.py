# Author: Green Mountain Systems AI Inc.

"""Result store factory."""

from typing import Optional

from .base import ResultStore
from .filesystem_backend import FilesystemStore
from .memory_backend import MemoryStore


def get_result_store(
    store_type: Optional[str] = None, out_dir: Optional[str] = None
) -> ResultStore:
    """Create and return the configured result store.

    Args:
        store_type: "filesystem" or "memory". If None, uses settings.
        out_dir: Output directory for the filesystem store

    Returns:
        ResultStore instance

    Raises:
        ValueError: If the store type is unknown
    """
    from ..config import get_settings

    settings = get_settings()
    store_type = (store_type or settings.store_type).lower()

    if store_type == "filesystem":
        return FilesystemStore(out_dir or settings.out_dir)
    elif store_type == "memory":
        return MemoryStore()
    else:
        raise ValueError(
            f"Unknown store type: {store_type}. Supported types: filesystem, memory"
        )
