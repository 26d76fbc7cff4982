"""Exceptions raised by regraph."""

from __future__ import annotations


class RegraphError(Exception):
    """Base class for all regraph errors."""


class ContractViolation(RegraphError, ValueError):
    """A precondition of a public operation does not hold."""


class InfeasibleParameters(ContractViolation):
    """No simple graph exists for the requested parameters."""


class UnverifiedPairsError(ContractViolation):
    """A dataset used for accuracy contains pairs without a known ground truth."""


class GraphParseError(RegraphError, ValueError):
    """An edge-list file does not follow the format."""

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class GenerationFailure(RegraphError, RuntimeError):
    """A random generator exhausted its retry budget."""


class CapabilityError(RegraphError):
    """The requested input is outside what the algorithm supports."""


class CountingInvariantError(RegraphError, AssertionError):
    """An embedding count failed its divisibility self-check."""


class DeadlineExceeded(RegraphError, TimeoutError):
    """A cooperative deadline expired."""
