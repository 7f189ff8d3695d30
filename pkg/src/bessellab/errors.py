"""Shared exception types.

Every failure mode that callers are expected to handle gets its own class;
plain ValueError/RuntimeError are reserved for programming errors.
"""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConvergenceFailure(RuntimeError):
    """An iterative solver did not reach its target accuracy."""


class SequenceExhausted(RuntimeError):
    """A finite point sequence is too short for the requested operation."""


class PrecisionFailure(RuntimeError):
    """Floating-point precision was insufficient for a certified result."""


class DiscretizationFailure(RuntimeError):
    """A discretization was too coarse to represent the target operator."""
