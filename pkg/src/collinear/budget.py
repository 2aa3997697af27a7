"""Enumeration budgets.

Every exhaustive routine takes a :class:`Budget`; exceeding it raises
:class:`~collinear.errors.BudgetExceeded` rather than truncating.  The default
profile is read from ``COLLINEAR_BUDGET`` (``ci``, ``desk`` or ``large``).
"""
from __future__ import annotations

import os
from dataclasses import dataclass, replace

from .errors import BudgetExceeded


@dataclass(frozen=True)
class Budget:
    max_points: int = 10**7
    max_directions: int = 10**6
    max_edges: int = 2 * 10**6
    exhaustive_vertices: int = 24
    exact_points: int = 60
    exact_lines: int = 400
    search_nodes: int = 5 * 10**6

    def check_points(self, count: int, what: str = "grid") -> None:
        if count > self.max_points:
            raise BudgetExceeded(
                f"instance too large: {what} has {count} points, budget is {self.max_points}"
            )

    def check_directions(self, count: int) -> None:
        if count > self.max_directions:
            raise BudgetExceeded(
                f"instance too large: {count} directions, budget is {self.max_directions}"
            )

    def check_edges(self, count: int) -> None:
        if count > self.max_edges:
            raise BudgetExceeded(
                f"instance too large: {count} edges, budget is {self.max_edges}"
            )

    def with_overrides(self, **kw) -> "Budget":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


PROFILES = {
    "ci": Budget(max_points=10**6, search_nodes=10**6),
    "desk": Budget(),
    "large": Budget(
        max_points=10**8,
        max_directions=10**7,
        max_edges=2 * 10**7,
        exhaustive_vertices=40,
        exact_points=90,
        exact_lines=2000,
        search_nodes=10**8,
    ),
}


def default_budget() -> Budget:
    name = os.environ.get("COLLINEAR_BUDGET", "desk")
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown budget profile {name!r}; choose from {sorted(PROFILES)}")
