"""Enumeration budgets and the shared error types.

Every operation that walks a full point set checks the number of points
against a budget first and refuses (rather than thrashes) when the walk is
too large.  The default budget can be overridden with the HOFF_BUDGET
environment variable or per call.
"""

import os

DEFAULT_ENUMERATION_BUDGET = 1 << 20

ENV_BUDGET_VAR = "HOFF_BUDGET"


class BudgetExceededError(Exception):
    """An enumeration would visit more points than the budget allows."""


class HypothesisError(Exception):
    """A stated hypothesis of the requested computation does not hold."""


def enumeration_budget(override: int | None = None) -> int:
    """Resolve the active budget: explicit override, else env var, else default."""
    if override is not None:
        if override <= 0:
            raise ValueError("budget must be positive")
        return override
    raw = os.environ.get(ENV_BUDGET_VAR)
    if raw is not None:
        try:
            value = int(raw)
        except ValueError as exc:
            raise ValueError(f"{ENV_BUDGET_VAR} must be an integer, got {raw!r}") from exc
        if value <= 0:
            raise ValueError(f"{ENV_BUDGET_VAR} must be positive, got {value}")
        return value
    return DEFAULT_ENUMERATION_BUDGET


def check_budget(npoints: int, budget: int | None = None, what: str = "enumeration") -> None:
    """Raise BudgetExceededError when npoints exceeds the active budget."""
    limit = enumeration_budget(budget)
    if npoints > limit:
        raise BudgetExceededError(f"{what} needs {npoints} points, budget is {limit}")
