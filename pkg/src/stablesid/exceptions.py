"""Exception types raised by stablesid operations.

All errors derive from :class:`StableSidError`.  Pipeline code attaches the
name of the failing stage to the ``stage`` attribute before re-raising, so
experiment drivers can report where a run died without string parsing.
"""

from __future__ import annotations


class StableSidError(Exception):
    """Base class for all stablesid errors."""

    stage: str | None = None


class NotPositiveDefinite(StableSidError):
    """A matrix required to be symmetric positive definite is not."""


class CommonEigenvalues(StableSidError):
    """Two matrices share an eigenvalue, so the Sylvester equation is singular."""


class UnstableMatrix(StableSidError):
    """A matrix required to have spectral radius below one does not."""


class UnstableModel(StableSidError):
    """A model violates its stability invariant."""


class NotObservable(StableSidError):
    """The pair (A, C) is not observable."""


class UnsupportedDimension(StableSidError):
    """The operation is only implemented for a restricted dimension."""


class InsufficientSamples(StableSidError):
    """A time series is too short for the requested window."""


class RankDeficientRegressors(StableSidError):
    """A regressor Gram matrix is singular."""


class OrderTooLarge(StableSidError):
    """The requested model order exceeds what the data window supports."""


class DimensionMismatch(StableSidError):
    """Array shapes are inconsistent."""


class SingularResolvent(StableSidError):
    """exp(j*omega) hits an eigenvalue, so the resolvent does not exist."""


class ParseError(StableSidError):
    """A data or configuration file is malformed."""


class AttemptBudgetExhausted(StableSidError):
    """Rejection sampling hit its attempt cap before reaching the target count.

    Carries the observed incidence so the caller can report it.
    """

    def __init__(self, message: str, attempts: int = 0, kept: int = 0):
        super().__init__(message)
        self.attempts = attempts
        self.kept = kept

    @property
    def incidence(self) -> float:
        return self.kept / self.attempts if self.attempts else 0.0
