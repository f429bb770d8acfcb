"""Enumeration budgets shared by every exhaustive search in the package."""

from __future__ import annotations

import os

DEFAULT_BUDGET = 1 << 24
ENV_VAR = "GAPFORGE_BUDGET_CAP"


class BudgetExceeded(RuntimeError):
    """Raised when an exhaustive search would exceed its enumeration budget."""

    def __init__(self, what: str, needed: int, budget: int):
        super().__init__(f"{what}: needs {needed} enumeration steps, budget is {budget}")
        self.what = what
        self.needed = needed
        self.budget = budget


def resolve_budget(budget: int | None = None) -> int:
    """Return the effective budget: the explicit value capped by the environment ceiling."""
    cap = os.environ.get(ENV_VAR)
    value = DEFAULT_BUDGET if budget is None else int(budget)
    if value <= 0:
        raise ValueError("budget must be positive")
    if cap:
        value = min(value, int(cap))
    return value


def check_budget(what: str, needed: int, budget: int | None = None) -> int:
    limit = resolve_budget(budget)
    if needed > limit:
        raise BudgetExceeded(what, needed, limit)
    return limit
