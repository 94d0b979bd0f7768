"""Exception types shared across the engine."""

from __future__ import annotations


class GreenlogError(Exception):
    """Base class for all engine errors."""


class DimensionMismatchError(GreenlogError):
    """Operands live over different coordinate dimensions."""


class DomainError(GreenlogError):
    """An analytic composition was requested outside its domain."""


class JetOrderError(GreenlogError):
    """A computation needs more trusted Taylor coefficients than supplied.

    Carries the order that would have been required so callers (and the CLI)
    can report exactly how deep the input jet must be.
    """

    def __init__(self, message: str, required: int | None = None,
                 available: int | None = None):
        if required is not None:
            message = f"{message} (required valid order {required}, have {available})"
        super().__init__(message)
        self.required = required
        self.available = available


class NotLaplaceTypeError(GreenlogError):
    """Principal symbol is not |xi|^2k at the base point; the symbol algebra
    only inverts Laplace-type principal parts over a normalized metric."""


class PrincipalOnlyError(GreenlogError):
    """A principal-part stand-in was queried for data that depends on the
    operator's lower-order terms, which the stand-in does not carry."""


class MissingPartError(GreenlogError):
    """A symbol expansion lacks the homogeneous part a computation needs."""


class ConventionError(GreenlogError):
    """An internal consistency check failed (e.g. a density that should be
    real came out complex), signalling a convention bug rather than bad input."""


class InputError(GreenlogError):
    """Malformed user input (expression syntax, metric file, CLI arguments)."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)
        self.position = position
