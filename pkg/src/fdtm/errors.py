"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument is outside the documented domain of an operation."""


class UnsupportedError(ValueError):
    """The inputs are valid but the requested case is out of scope."""


class CsvFormatError(ValueError):
    """A CSV file does not match the expected schema.

    Carries the 1-based row number of the offending line when known.
    """

    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"{message} (row {row})"
        super().__init__(message)
        self.row = row
