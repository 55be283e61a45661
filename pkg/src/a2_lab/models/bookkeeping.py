# Author: Green Mountain Systems AI Inc.

"""Start, copy, exceptional and stopping intervals of an iterated remodeling.

Intervals are stored relative to the origin of the remodeled function; for
functions on I0 this is the absolute dyadic position. ``target`` is the
interval F(I) of the original function whose structure I carries.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from .core import IntervalRole
from .dyadic import DyadicInterval


@dataclass(frozen=True)
class BookkeepingEntry:
    order: int  # k, the target lies in D_{2k-1}
    role: IntervalRole
    interval: DyadicInterval
    target: DyadicInterval


@dataclass
class RemodelBookkeeping:
    """Everything the recursion of an iterated (quasi-)periodization touched."""

    quasi: bool
    frequencies: tuple[int, ...]
    entries: list[BookkeepingEntry] = field(default_factory=list)

    def add(
        self, order: int, role: IntervalRole, interval: DyadicInterval, target: DyadicInterval
    ) -> None:
        self.entries.append(BookkeepingEntry(order, role, interval, target))

    def frequency(self, order: int) -> int:
        """N_k, repeating the last entry past the end of the vector."""
        return self.frequencies[min(order, len(self.frequencies)) - 1]

    def by_role(self, role: IntervalRole) -> list[BookkeepingEntry]:
        return [e for e in self.entries if e.role == role]

    def orders(self) -> list[int]:
        return sorted({e.order for e in self.entries})

    def start_measure(self, target: DyadicInterval) -> Fraction:
        """Sum of |I| over starting intervals with F(I) = target."""
        return sum(
            (e.interval.length for e in self.by_role(IntervalRole.START) if e.target == target),
            Fraction(0),
        )

    def counts(self) -> dict[int, dict[str, int]]:
        tally: dict[int, Counter] = defaultdict(Counter)
        for e in self.entries:
            tally[e.order][e.role.value] += 1
        return {
            k: {role.value: tally[k][role.value] for role in IntervalRole} for k in sorted(tally)
        }

    def rows(self) -> list[dict[str, str]]:
        """Per-order counts with the distinct targets of the starting intervals."""
        rows = []
        for order, counts in self.counts().items():
            targets = sorted(
                e.target
                for e in self.entries
                if e.order == order and e.role == IntervalRole.START
            )
            rows.append(
                {
                    "order": str(order),
                    "frequency": str(self.frequency(order)),
                    "start": str(counts[IntervalRole.START.value]),
                    "stopping": str(counts[IntervalRole.STOP.value]),
                    "regular": str(counts[IntervalRole.COPY.value]),
                    "exceptional": str(counts[IntervalRole.EXCEPTIONAL.value]),
                    "targets": ";".join(str(t) for t in targets),
                }
            )
        return rows
