# Author: Green Mountain Systems AI Inc.

"""Flat key-value run files.

A run file is plain text with one ``key = value`` per line::

    # pi exponent sweep
    experiment = pi-exponent
    q-grid = 8, 16, 32, 64
    seed = 7

Keys use the CLI flag names; dashes and underscores are interchangeable.
Values are returned as strings and validated by ``ExperimentSpec``.
"""

from pathlib import Path
from typing import Union

RUN_FILE_KEYS = frozenset(
    {
        "experiment",
        "q_grid",
        "delta0",
        "nmax",
        "witness",
        "evaluator",
        "frequencies",
        "out",
        "seed",
        "tol",
        "depth",
        "rounds",
        "rotate",
        "convention",
    }
)


def load_run_file(path: Union[str, Path]) -> dict[str, str]:
    """Parse a run file into a dict of normalized keys to raw values.

    Args:
        path: Location of the run file

    Returns:
        Mapping with underscore-normalized keys

    Raises:
        ValueError: On malformed lines or unknown keys (message names the line)
    """
    entries: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_").lower()
        if key not in RUN_FILE_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        if not value:
            raise ValueError(f"{path}:{lineno}: empty value for {key!r}")
        entries[key] = value
    return entries
