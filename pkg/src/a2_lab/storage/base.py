# Author: Green Mountain Systems AI Inc.

"""Base result store interface."""

import math
from abc import ABC, abstractmethod
from typing import Any, Optional

from ..models.dyadic import PiecewiseFn
from ..models.experiment import ExperimentResult

RESULTS_HEADER = "# matrix-a2-lab results v1"


def format_cell(value: Any) -> str:
    """Deterministic text for one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def json_safe(value: Any) -> Any:
    """Replace non-finite floats by None, recursively."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    return value


def columns(rows: list[dict[str, Any]]) -> list[str]:
    """Union of row keys in order of first appearance."""
    seen: dict[str, None] = {}
    for row in rows:
        for key in row:
            seen.setdefault(key, None)
    return list(seen)


class ResultStore(ABC):
    """Abstract base class for result stores."""

    @abstractmethod
    def write_table(
        self, name: str, rows: list[dict[str, Any]], header: Optional[str] = None
    ) -> None:
        """Store rows as the CSV table ``name``, with an optional comment line."""
        pass

    @abstractmethod
    def write_json(self, name: str, data: dict[str, Any]) -> None:
        """Store a JSON document."""
        pass

    @abstractmethod
    def read_table(self, name: str) -> list[dict[str, str]]:
        """Rows of a stored table, values as text."""
        pass

    @abstractmethod
    def read_json(self, name: str) -> Optional[dict[str, Any]]:
        """A stored JSON document, or None."""
        pass

    @abstractmethod
    def names(self) -> list[str]:
        """Stored file names."""
        pass

    # Higher-level operations

    def save_result(self, result: ExperimentResult) -> list[str]:
        """Write results.csv, summary.json, plotdata.csv and any extra tables.

        Returns:
            The names written, in order
        """
        written = ["results.csv", "summary.json", "plotdata.csv"]
        self.write_table("results.csv", result.rows, header=RESULTS_HEADER)
        self.write_json(
            "summary.json",
            {
                "experiment": result.experiment.value,
                "spec": result.spec,
                "checks": result.checks,
                "passed": result.passed,
                "fits": result.fits,
                "summary": result.summary,
                "runtime_s": result.runtime_s,
            },
        )
        self.write_table("plotdata.csv", result.plot_rows)
        for stem in sorted(result.tables):
            name = f"{stem}.csv"
            self.write_table(name, result.tables[stem])
            written.append(name)
        return written

    def save_weight(self, w: PiecewiseFn, v: PiecewiseFn) -> list[str]:
        """Write the leaf values of W and W^-1 as weight.csv and inverse_weight.csv."""
        header = f"# matrix-a2-lab weight v1 depth={w.depth}"
        self.write_table("weight.csv", w.dump_rows(), header=header)
        self.write_table("inverse_weight.csv", v.dump_rows(), header=header)
        return ["weight.csv", "inverse_weight.csv"]
