"""Exception types shared across the package.

The CLI maps these onto exit codes: usage problems (ParameterError) exit 1,
data problems (DataError subclasses) exit 2, anything else exit 3.
"""


class MdltabError(Exception):
    """Base class for all package errors."""


class ParameterError(MdltabError):
    """A parameter is outside its documented domain (bad minsup, max_clusters < 1, ...)."""


class DataError(MdltabError):
    """Problems with input data."""


class ParseError(DataError):
    """Malformed input file. Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyDatasetError(DataError):
    """The input contains no transactions."""


class DomainError(DataError):
    """An item id falls outside the dataset alphabet."""


class UncoverableItemError(DomainError):
    """A transaction contains items no code-table row can cover."""

    def __init__(self, items):
        self.items = tuple(sorted(items))
        super().__init__(f"items not coverable by the code table: {self.items}")


class ContractError(MdltabError):
    """An operation was called outside its contract (e.g. non-closed pattern)."""


class UndefinedClosureError(ContractError):
    """Closure requested for a pattern with support zero."""
