"""Error taxonomy shared by every backend.

Each error names the condition, not the caller's remedy; where a remedy
exists (another backend that handles the input), the message points at it.
"""
from __future__ import annotations


class CCNormError(Exception):
    """Base class for all library errors."""


class InvalidParameters(CCNormError, ValueError):
    """Input vector violates a domain invariant (non-finite, wrong sign, ...)."""


class DegenerateParameters(CCNormError):
    """Exactly tied natural parameters; the difference-product form divides
    by zero. The repeated-value backend handles these inputs exactly."""


class OverflowInSummand(CCNormError):
    """A summand overflows the selected floating-point format; use the
    signed log-space evaluation instead."""


class PrecisionExhausted(CCNormError):
    """The adaptive precision loop hit its bit ceiling without two
    successive evaluations agreeing. Carries the last two values."""

    def __init__(self, message: str, last_two: tuple[float, float]):
        super().__init__(message)
        self.last_two = last_two


class UnsupportedDimension(CCNormError):
    """Requested dimension outside the backend's supported range."""


class PoleHit(CCNormError):
    """Transform image evaluated exactly at one of its poles."""


class InversionDiverged(CCNormError):
    """Numerical inverse transform produced a non-finite intermediate."""


class AmbiguousTies(CCNormError):
    """Tie clustering chained groups whose representatives are closer than
    the tolerance; the grouping is not well defined. Carries the chain."""

    def __init__(self, message: str, chain: list[float]):
        super().__init__(message)
        self.chain = chain


class MomentInconsistent(CCNormError):
    """Independent moment backends disagree beyond the agreement threshold;
    neither value is returned."""
