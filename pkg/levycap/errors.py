"""
Exceptions raised by levycap.

Divergent integrals are results, not errors: see levycap.gauge.Divergent.
"""

from typing import Optional


class LevycapError(Exception):
    """Base class for every levycap error."""

    exit_code = 2


class ConfigurationError(LevycapError):
    """
    Invalid input: a malformed spec, measure, control or CLI flag.

    `field` names the offending field when there is one.
    """

    def __init__(self, message: str, field: Optional[str] = None) -> None:
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class DomainError(ConfigurationError):
    """A parameter lies outside its admissible range (e.g. gamma not in (0, d))."""


class DimensionError(ConfigurationError):
    """Sizes of kernels, measures or vectors disagree."""


class PreconditionError(ConfigurationError):
    """A casebook or gauge precondition does not hold."""


class UnsupportedConfigurationError(LevycapError):
    """A valid input that this implementation deliberately does not handle."""

    exit_code = 3


class NumericalError(LevycapError):
    """A numerical invariant asserted during a computation was violated."""

    exit_code = 3
