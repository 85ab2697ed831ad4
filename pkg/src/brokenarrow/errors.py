"""brokenarrow.errors

Exception types shared by all brokenarrow subpackages.

Everything raised for bad *data* derives from BrokenArrowError, which is a
ValueError, so callers that already catch ValueError keep working. The CLI
maps these to exit code 2; anything else is an internal error (exit code 1).
"""

from __future__ import annotations


class BrokenArrowError(ValueError):
    """Base class for domain errors raised by the library."""


class DomainError(BrokenArrowError):
    """A parameter lies outside the range the construction is defined on."""


class NormalizationError(BrokenArrowError):
    """A state vector is not normalized (beyond the renormalization window)."""


class DegeneracyError(BrokenArrowError):
    """A construction divides by a vanishing quantity."""


class InfeasibleMomentsError(BrokenArrowError):
    """Moments imply a joint probability outside [0, 1]."""


class UndefinedCoefficientError(BrokenArrowError):
    """A correlation coefficient is requested for a zero-variance marginal."""


class SignalingError(BrokenArrowError):
    """A correlation array fails the non-signaling check."""


class RelabelingError(BrokenArrowError):
    """A relabeling map is not a bijection on settings and outcomes."""


class RegionError(BrokenArrowError):
    """Unknown region, setup or emission mode."""


class ConfigError(BrokenArrowError):
    """A CLI flag or YAML value could not be parsed."""
