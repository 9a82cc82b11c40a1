"""Exception hierarchy shared by all modules.

The CLI maps ``ValidationError`` to exit code 2 and ``ResourceError``
(including its subclasses) to exit code 3.
"""


class Schottky4Error(Exception):
    """Base class for all package errors."""


class ValidationError(Schottky4Error, ValueError):
    """Input violates a documented precondition or type invariant."""


class DomainError(ValidationError):
    """Argument outside the supported evaluation domain."""


class SpaceMismatchError(ValidationError):
    """Divisor classes living on different compactifications were combined."""


class DegenerateError(ValidationError):
    """A quantity needed for normalization vanishes numerically."""


class ResourceError(Schottky4Error, RuntimeError):
    """A computation exceeded a configured resource bound or failed to converge."""


class ResourceLimitError(ResourceError):
    """An enumeration grew past its configured ceiling."""


class CutoffInfeasibleError(ResourceError):
    """No available truncation meets the requested tolerance."""


class ConvergenceError(ResourceError):
    """A numerical self-check (quadrature doubling, Riemann relations) failed."""
