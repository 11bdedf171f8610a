"""Shared error types.

PrecondError marks precondition violations (maps to CLI exit code 2);
domain failures are reported as data or raised as ordinary exceptions
(CLI exit code 1).
"""


class PrecondError(ValueError):
    """An operation was invoked outside its stated precondition."""


class BudgetError(RuntimeError):
    """An internal resource cap was exceeded."""
