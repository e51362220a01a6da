"""
Custom exceptions for memsgd.

All exceptions inherit from MemSGDException for easy catching.
"""
from typing import Optional


class MemSGDException(Exception):
    """Base exception for all memsgd errors."""
    pass


class ConfigurationError(MemSGDException):
    """Raised when configuration is invalid."""
    pass


class ValidationError(MemSGDException):
    """Raised when an argument violates a documented precondition."""
    pass


class DimensionMismatchError(ValidationError):
    """Raised when vectors or masks of different dimensions are combined."""
    pass


class ProblemError(MemSGDException):
    """Base exception for problem-oracle errors."""
    pass


class UnknownProblemError(ProblemError):
    """Raised when a problem name is not registered."""
    pass


class CompressorError(MemSGDException):
    """Raised when a compressor or mask is misconfigured."""
    pass


class ScheduleError(MemSGDException):
    """Raised when learning-rate schedule parameters are invalid."""
    pass


class NumericalError(MemSGDException):
    """Base exception for numerical failures."""
    pass


class NonFiniteError(NumericalError):
    """Raised when a NaN or Inf shows up in an iterate or update vector."""

    def __init__(
        self,
        message: str,
        iteration: Optional[int] = None,
        worker_id: Optional[int] = None
    ):
        super().__init__(message)
        self.iteration = iteration
        self.worker_id = worker_id


class ProxSolveError(NumericalError):
    """Raised when the inner proximal solve does not reach its tolerance."""

    def __init__(self, message: str, achieved_norm: float, iterations: int):
        super().__init__(message)
        self.achieved_norm = achieved_norm
        self.iterations = iterations


class InvariantViolationError(MemSGDException):
    """Raised when a runtime diagnostic detects a broken identity or bound."""
    pass


class InputFileError(MemSGDException):
    """Raised when an input file cannot be read or is inconsistent."""
    pass
