"""Centered error distributions used by the simulation catalog.

Every kind has mean zero by construction.  ``variance`` doubles as the
half-width for the symmetric uniform kind; the two x-dependent kinds take
the covariate value at sampling time (variance sqrt(x), respectively support
[-sqrt(x), sqrt(x)]).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .backend import core
from .errors import DomainError
from .rng import RngStream

__all__ = ["ErrorKind", "ErrorDistSpec", "sample_error"]


class ErrorKind(Enum):
    NORMAL_VAR = core.K_NORMAL_VAR
    UNIFORM_SYM = core.K_UNIFORM_SYM
    DOUBLE_WEIBULL = core.K_DOUBLE_WEIBULL
    SCALED_BETA62 = core.K_SCALED_BETA62
    CHISQ2_CENTERED = core.K_CHISQ2_CENTERED
    LOGNORMAL_CENTERED = core.K_LOGNORMAL_CENTERED
    NORMAL_VAR_SQRTX = core.K_NORMAL_VAR_SQRTX
    UNIFORM_SQRTX = core.K_UNIFORM_SQRTX


_X_DEPENDENT = {ErrorKind.NORMAL_VAR_SQRTX, ErrorKind.UNIFORM_SQRTX}
_PARAMETRIC = {ErrorKind.NORMAL_VAR, ErrorKind.UNIFORM_SYM}

# Exact variances of the parameter-free kinds, for moment checks and docs:
# double-Weibull gamma(5/3), scaled beta 1, centered chi-square(2) 4,
# centered log-normal (e-1)e.


@dataclass(frozen=True)
class ErrorDistSpec:
    """One error distribution: a kind plus its variance/half-width parameter."""

    kind: ErrorKind
    variance: float = 1.0

    def __post_init__(self):
        if self.kind in _PARAMETRIC and not self.variance > 0.0:
            raise DomainError(f"{self.kind.name} requires a positive parameter")

    @property
    def x_dependent(self) -> bool:
        return self.kind in _X_DEPENDENT

    def describe(self) -> str:
        k = self.kind
        if k is ErrorKind.NORMAL_VAR:
            return f"normal(var={self.variance:g})"
        if k is ErrorKind.UNIFORM_SYM:
            return f"uniform(+-{self.variance:g})"
        if k is ErrorKind.DOUBLE_WEIBULL:
            return "double_weibull(0,1,3)"
        if k is ErrorKind.SCALED_BETA62:
            return "sqrt48*(beta(6,2)-3/4)"
        if k is ErrorKind.CHISQ2_CENTERED:
            return "chisq(2)-2"
        if k is ErrorKind.LOGNORMAL_CENTERED:
            return "lognormal(0,1)-e^(1/2)"
        if k is ErrorKind.NORMAL_VAR_SQRTX:
            return "normal(var=sqrt(x))"
        return "uniform(+-sqrt(x))"


def sample_error(spec: ErrorDistSpec, x: float, rng: RngStream) -> float:
    """One draw from ``spec``; x must be positive for x-dependent kinds."""
    if spec.x_dependent and not x > 0.0:
        raise DomainError(
            f"{spec.kind.name} requires a positive covariate value, got {x!r}")
    return core.sample_error(rng._state, spec.kind.value, spec.variance, x)


def sample_error_block(spec: ErrorDistSpec, x: float, rng: RngStream,
                       n: int) -> tuple[float, float, float, float]:
    """(sum, sum of squares, min, max) over n draws; used by moment tests."""
    if spec.x_dependent and not x > 0.0:
        raise DomainError(
            f"{spec.kind.name} requires a positive covariate value, got {x!r}")
    return core.sample_error_block(rng._state, spec.kind.value, spec.variance, x, n)
