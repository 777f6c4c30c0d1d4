"""Typed exceptions raised across the package."""


class OslrError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(OslrError, ValueError):
    """A CSV file is missing required columns or is otherwise malformed."""


class RowValidationError(OslrError, ValueError):
    """A CSV row violates an observation invariant; carries the row number."""

    def __init__(self, row: int, message: str):
        self.row = row
        super().__init__(f"row {row}: {message}")


class DomainError(OslrError, ValueError):
    """A parameter vector lies outside the family's open parameter space."""


class FitError(OslrError, RuntimeError):
    """Maximum-likelihood fitting failed; carries the last iterate when known."""

    def __init__(self, message: str, last_theta=None):
        self.last_theta = last_theta
        super().__init__(message)


class SelectionError(OslrError, ValueError):
    """Model selection was asked to choose from an empty or all-failed list."""


class DegenerateTestError(OslrError, ValueError):
    """The test statistic is undefined: total variance estimate is zero."""


class UsageError(OslrError, ValueError):
    """Invalid argument or configuration supplied by the caller."""
