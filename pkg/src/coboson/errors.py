"""Exception types shared across the package.

The CLI maps these onto its exit statuses: parse failures exit with 2,
domain/validation failures with 3 and accuracy/convergence failures with 4.
"""


class CobosonError(Exception):
    """Base class for all package-specific errors."""


class DomainError(CobosonError, ValueError):
    """An input violates a documented precondition or physical constraint."""


class ChannelClosedError(DomainError):
    """A closed decay channel makes the requested closed form undefined."""


class ExceptionalPointError(DomainError):
    """Operation evaluated at (or away from) a spectral coalescence point."""


class AccuracyError(CobosonError, RuntimeError):
    """A numerical result failed its convergence or tolerance check."""


class ScenarioParseError(CobosonError, ValueError):
    """A scenario document is not well-formed."""


class ScenarioValidationError(DomainError):
    """A scenario document is well-formed but violates its schema."""
