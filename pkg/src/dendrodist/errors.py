"""Exception types shared across the package."""


class DendrodistError(Exception):
    """Base class for all package errors."""


class InvalidTreeError(DendrodistError, ValueError):
    """A tree violates a structural invariant."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class TreeParseError(DendrodistError, ValueError):
    """Tree text could not be parsed. Carries 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.column = column


class BudgetExceededError(DendrodistError):
    """A tree is too large for the exact edit-distance search."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class InvalidMeasureError(DendrodistError, ValueError):
    """A pruning measure has invalid parameters."""


class SchemaError(DendrodistError, ValueError):
    """Tabular input does not match the expected columns."""
