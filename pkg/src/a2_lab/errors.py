# Author: Green Mountain Systems AI Inc.

"""Domain errors raised by the lab engines.

All errors derive from ``ValueError`` so that callers validating input the
ordinary way keep working; experiments catch ``DomainError`` per grid row.
"""

from typing import Optional


class DomainError(ValueError):
    """Input outside the domain of a mathematical operation."""


class ConstructionError(DomainError):
    """A rotation or stretch precondition failed while building a weight."""

    def __init__(self, message: str, generation: Optional[int] = None) -> None:
        self.generation = generation
        if generation is not None:
            message = f"generation {generation}: {message}"
        super().__init__(message)


class DepthExceededError(DomainError):
    """A materialized object would be deeper than allowed."""

    def __init__(self, requested: int, allowed: int, what: str = "depth") -> None:
        self.requested = requested
        self.allowed = allowed
        super().__init__(f"{what} {requested} exceeds the allowed {allowed}")


class TruncationError(DomainError):
    """A truncated series cannot meet the requested tolerance."""

    def __init__(self, terms: int, required: int, bound: float, tol: float) -> None:
        self.terms = terms
        self.required = required
        self.bound = bound
        self.tol = tol
        super().__init__(
            f"K={terms} gives tail bound {bound:.3e} > tol {tol:.3e}; need K >= {required}"
        )


class BudgetExceededError(DomainError):
    """A brute-force enumeration is larger than the configured budget."""

    def __init__(self, pairs: int, budget: int) -> None:
        self.pairs = pairs
        self.budget = budget
        super().__init__(
            f"{pairs} interval pairs exceed the budget of {budget}; "
            "use the fast evaluator instead"
        )
