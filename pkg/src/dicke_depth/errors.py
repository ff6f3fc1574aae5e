"""Exception hierarchy shared by the library and the command-line front end."""


class DickeDepthError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InputError(DickeDepthError, ValueError):
    """Invalid argument or state supplied to an operation."""

    exit_code = 2


class ConfigError(InputError):
    exit_code = 2


class ParseError(DickeDepthError, ValueError):
    """Malformed measurement file; carries the offending line number."""

    exit_code = 3

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(ParseError):
    pass


class SizeError(DickeDepthError, ValueError):
    """Problem too large for the dense engine or for exhaustive enumeration."""

    exit_code = 4


class ConversionError(DickeDepthError, ValueError):
    """Dense state cannot be mapped onto the maximal-spin ladder."""

    exit_code = 2

    def __init__(self, message, leakage=None):
        super().__init__(message)
        self.leakage = leakage


class NumericalConsistencyError(DickeDepthError, ArithmeticError):
    exit_code = 2


class DomainError(InputError):
    pass
