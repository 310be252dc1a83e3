"""Exception types shared across the package."""

from __future__ import annotations


class CovadjError(Exception):
    """Base class for all covadj errors."""


class DomainError(CovadjError, ValueError):
    """Argument outside a function's mathematical domain."""


class InsufficientData(CovadjError):
    """Too few observations for the requested fit or test."""


class DegenerateDesign(CovadjError):
    """Covariate values carry no information (all equal within a fit)."""


class ZeroVarianceGroup(CovadjError):
    """A group has zero within-group variance where a positive one is required."""


class UnsupportedDesign(CovadjError):
    """Operation defined only for a restricted design (e.g. two treatments)."""


class SimulationError(CovadjError):
    """A Monte-Carlo replicate failed; the message names the replicate."""


class InputFormatError(CovadjError):
    """Malformed input file; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownCaseError(CovadjError):
    """Requested case id not present in the catalog or case file."""
