"""Shared exception types and the search budget used by the whole package."""

from __future__ import annotations

import os

#: Exhaustive searches over Hom/End spaces are allowed while the space has at
#: most this many elements; larger spaces fall back to randomized attempts
#: that fail loudly instead of silently returning a wrong answer.
SEARCH_BOUND = 2 ** 16

#: Default number of search nodes (hom-space elements scanned plus recursion
#: steps) granted to backtracking searches when the caller does not supply a
#: budget.  Overridable through the FILTRA_BUDGET environment variable.
DEFAULT_BUDGET = 2_000_000


class FiltraError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(FiltraError):
    """Shapes of matrices or representations do not line up."""


class ValidationError(FiltraError):
    """A structural invariant failed; the message names the invariant."""


class ParseError(FiltraError):
    """Workspace text is malformed.  Carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ExtObstruction(FiltraError):
    """An operation needed a vanishing ext group that does not vanish."""


class ZeroExt(FiltraError):
    """A universal extension was requested over a zero ext group."""


class SearchBoundExceeded(FiltraError):
    """An exhaustive search space is too large and sampling found nothing.

    Raised instead of guessing: the caller learns that the answer is unknown,
    never receives a silently wrong one.
    """


class BudgetExceeded(FiltraError):
    """A backtracking search ran out of its node budget."""

    def __init__(self, limit: int):
        super().__init__(f"search budget of {limit} nodes exhausted")
        self.limit = limit


def default_budget() -> int:
    """Budget used when none is passed; FILTRA_BUDGET overrides the default."""
    raw = os.environ.get("FILTRA_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValidationError(f"FILTRA_BUDGET must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise ValidationError("FILTRA_BUDGET must be positive")
    return value


class Budget:
    """Mutable node counter shared along one search tree."""

    __slots__ = ("limit", "used")

    def __init__(self, limit: int | None = None):
        self.limit = default_budget() if limit is None else limit
        self.used = 0

    def spend(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise BudgetExceeded(self.limit)
