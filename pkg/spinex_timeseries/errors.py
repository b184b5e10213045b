"""
Exceptions raised by spinex_timeseries. Everything derives from L{SpinexError}; problems with the input data derive
from L{DataError} as well as from the closest builtin, so callers that only catch ValueError keep working.
"""

__all__ = [
    "SpinexError", "DataError", "ConfigurationError",
    "IoError", "ParseError", "EmptyInput", "InvalidSeries", "TooShort", "LengthMismatch", "InsufficientData",
    "WindowTooLarge", "IndexOutOfRange", "NoValidCandidates", "UnknownFunction", "UnknownMethod",
    "DegenerateInput", "EmptyResult",
]


class SpinexError(Exception):
    pass


class DataError(SpinexError):
    """ The input data cannot be processed. Maps to exit code 2 on the command line. """
    pass


class ConfigurationError(SpinexError):
    pass


class IoError(DataError, OSError):
    pass


class ParseError(DataError, ValueError):
    def __init__(self, row: int, column: str | int, message: str = None):
        self.row = row
        self.column = column
        super().__init__(message or f"Cannot parse value in row {row}, column {column!r}")


class EmptyInput(DataError, ValueError):
    pass


class InvalidSeries(DataError, ValueError):
    pass


class TooShort(DataError, ValueError):
    pass


class LengthMismatch(DataError, ValueError):
    pass


class InsufficientData(DataError, ValueError):
    pass


class WindowTooLarge(DataError, ValueError):
    pass


class IndexOutOfRange(DataError, IndexError):
    pass


class NoValidCandidates(DataError, ValueError):
    pass


class UnknownFunction(DataError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown function"


class UnknownMethod(DataError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown method"


class DegenerateInput(DataError, ValueError):
    pass


class EmptyResult(DataError, ValueError):
    pass
