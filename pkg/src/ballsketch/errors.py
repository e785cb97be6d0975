"""Exception types shared across the package.

The CLI maps these onto exit codes, so raising the right class matters:
input problems (bad files, bad data) are distinct from configuration
problems (impossible parameter combinations).
"""


class BallsketchError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(BallsketchError):
    """A parameter combination that can never be valid (e.g. bad register count)."""


class InputError(BallsketchError):
    """Malformed or inconsistent input data (files, score tables, samples)."""


class UndefinedValueError(BallsketchError):
    """A requested quantity has no defined value (e.g. conductance of a zero-volume set)."""


class PreconditionError(BallsketchError):
    """A bound's precondition does not hold for the supplied widths."""
