# Author: Green Mountain Systems AI Inc.

"""In-memory result store, used by tests and dry runs."""

import json
from typing import Any, Optional

from .base import ResultStore, json_safe
from .filesystem_backend import parse_csv, render_csv


class MemoryStore(ResultStore):
    """Keeps rendered files in a dict keyed by name."""

    def __init__(self) -> None:
        self.files: dict[str, str] = {}

    def write_table(
        self, name: str, rows: list[dict[str, Any]], header: Optional[str] = None
    ) -> None:
        self.files[name] = render_csv(rows, header)

    def write_json(self, name: str, data: dict[str, Any]) -> None:
        self.files[name] = json.dumps(json_safe(data), indent=2, sort_keys=True, allow_nan=False)

    def read_table(self, name: str) -> list[dict[str, str]]:
        if name not in self.files:
            return []
        return parse_csv(self.files[name])

    def read_json(self, name: str) -> Optional[dict[str, Any]]:
        if name not in self.files:
            return None
        data: dict[str, Any] = json.loads(self.files[name])
        return data

    def names(self) -> list[str]:
        return sorted(self.files)
