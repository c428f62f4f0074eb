"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ``ConfigError`` and its subclasses -> 2,
``NumericalError`` -> 3.
"""


class InputError(ValueError):
    """Bad argument to a numerical routine (dimension mismatch, negative radius...)."""


class UnsupportedError(InputError):
    """The requested combination is not defined for this routine."""


class NyquistError(InputError):
    """The frequency lattice cannot resolve the requested band."""

    def __init__(self, message, minimal_n):
        super().__init__(message)
        self.minimal_n = minimal_n


class NumericalError(ArithmeticError):
    """An iterative or fitting procedure failed to produce a trustworthy answer."""


class FitError(NumericalError):
    pass


class ConfigError(Exception):
    """Base for everything wrong with a run configuration."""


class ConfigParseError(ConfigError):
    pass


class SchemaError(ConfigError):
    pass


class PreconditionError(ConfigError):
    pass
