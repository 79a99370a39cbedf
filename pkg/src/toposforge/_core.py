"""Shared plumbing: errors, canonical ordering of elements, enumeration budget."""

from __future__ import annotations

import functools
import os
from typing import Any

BUDGET_ENV = "TOPOSFORGE_BUDGET"
DEFAULT_BUDGET = 1_000_000


class InputError(ValueError):
    """Raised when an operation receives data violating its precondition."""


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration would exceed the configured budget."""


def budget(default: int = DEFAULT_BUDGET) -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
    if value <= 0:
        raise InputError(f"{BUDGET_ENV} must be positive, got {value}")
    return value


class Counter:
    """Counts enumerated items and raises once the budget is spent."""

    __slots__ = ("limit", "spent", "what")

    def __init__(self, what: str, limit: int | None = None):
        self.what = what
        self.limit = budget() if limit is None else limit
        self.spent = 0

    def tick(self, n: int = 1) -> None:
        self.spent += n
        if self.spent > self.limit:
            raise BudgetExceeded(f"{self.what}: enumeration budget of {self.limit} exceeded")


def sort_key(x: Any) -> tuple:
    """Total, deterministic ordering key for the element values used throughout."""
    if isinstance(x, str):
        return (0, x)
    if isinstance(x, bool):
        return (1, int(x))
    if isinstance(x, int):
        return (1, x)
    if isinstance(x, tuple):
        return _tuple_key(x)
    if isinstance(x, frozenset):
        return (3, tuple(sorted(sort_key(e) for e in x)))
    if x is None:
        return (-1,)
    key = getattr(x, "sort_key", None)
    if key is not None:
        return (4, key())
    raise TypeError(f"no canonical ordering for {type(x).__name__}")


@functools.lru_cache(maxsize=1 << 16)
def _tuple_key(x: tuple) -> tuple:
    return (2, tuple(sort_key(e) for e in x))


def canonical(xs) -> tuple:
    return tuple(sorted(xs, key=sort_key))


def label(x: Any) -> str:
    """Human-readable, deterministic string for an element."""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, bool)):
        return str(x)
    if isinstance(x, tuple):
        return "(" + ",".join(label(e) for e in x) + ")"
    if isinstance(x, frozenset):
        return "{" + ",".join(label(e) for e in canonical(x)) + "}"
    if x is None:
        return "*"
    lab = getattr(x, "label", None)
    if lab is not None:
        return lab()
    return repr(x)
