# Author: Green Mountain Systems AI Inc.

"""Filesystem result store writing CSV and JSON files into a directory."""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Optional, Union

from .base import ResultStore, columns, format_cell, json_safe

logger = logging.getLogger(__name__)


def render_csv(rows: list[dict[str, Any]], header: Optional[str] = None) -> str:
    """CSV text with a fixed column order and '\\n' line endings."""
    buffer = io.StringIO()
    if header:
        buffer.write(header + "\n")
    fields = columns(rows)
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: format_cell(row.get(key)) for key in fields})
    return buffer.getvalue()


def parse_csv(text: str) -> list[dict[str, str]]:
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(lines))


class FilesystemStore(ResultStore):
    """Results under one output directory.

    Suitable for CLI runs; files are overwritten on every save.
    """

    def __init__(self, root: Union[str, Path]):
        """Initialize the store.

        Args:
            root: Output directory, created on first write
        """
        self.root = Path(root)

    def _path(self, name: str) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        return self.root / name

    def write_table(
        self, name: str, rows: list[dict[str, Any]], header: Optional[str] = None
    ) -> None:
        path = self._path(name)
        path.write_text(render_csv(rows, header), encoding="utf-8")
        logger.debug("Wrote %d rows to %s", len(rows), path)

    def write_json(self, name: str, data: dict[str, Any]) -> None:
        text = json.dumps(json_safe(data), indent=2, sort_keys=True, allow_nan=False)
        self._path(name).write_text(text + "\n", encoding="utf-8")

    def read_table(self, name: str) -> list[dict[str, str]]:
        path = self.root / name
        if not path.exists():
            return []
        return parse_csv(path.read_text(encoding="utf-8"))

    def read_json(self, name: str) -> Optional[dict[str, Any]]:
        path = self.root / name
        if not path.exists():
            return None
        data: dict[str, Any] = json.loads(path.read_text(encoding="utf-8"))
        return data

    def names(self) -> list[str]:
        if not self.root.exists():
            return []
        return sorted(p.name for p in self.root.iterdir() if p.is_file())
