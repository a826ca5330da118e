"""Exception hierarchy shared by the library and the CLI."""


class CautiousError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 3


class DomainError(CautiousError, ValueError):
    """An argument lies outside the domain of the operation."""

    exit_code = 2


class PreconditionError(CautiousError):
    """The data or configuration does not satisfy an operation's precondition."""

    exit_code = 2


class CapacityError(PreconditionError):
    """The requested exhaustive computation exceeds the configured capacity."""


class NumericError(CautiousError, ArithmeticError):
    """A factorization or fit failed numerically."""

    exit_code = 3


class DataParseError(CautiousError, ValueError):
    """An input file could not be parsed.

    `row` and `column` are 1-based and refer to the data rows of the file
    (the header is row 0).
    """

    exit_code = 2

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column '{column}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.row = row
        self.column = column
