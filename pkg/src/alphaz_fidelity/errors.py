"""Exception hierarchy for the alpha-z-fidelity toolkit."""

from typing import Optional


class AlphaZError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(AlphaZError, ValueError):
    """Input failed a structural or numerical invariant."""


class NotPSDError(ValidationError):
    """Matrix has an eigenvalue below the PSD clamp threshold."""


class ParameterError(ValidationError):
    """A scalar parameter (alpha, z, t, rank, ...) is out of range."""


class SupportError(AlphaZError):
    """supp(rho) is not contained in supp(sigma) where alpha > 1 requires it."""


class UnsupportedRegionError(AlphaZError):
    """No closed form is proven for the requested (alpha, z)."""

    def __init__(self, message: str, stated_region: Optional[str] = None):
        super().__init__(message)
        self.stated_region = stated_region


class RangeError(AlphaZError, ValueError):
    """Target value lies outside the attainable interval."""


class PreconditionError(AlphaZError, ValueError):
    """Operation-specific precondition failed (rank, channel class, ...)."""


class ConfigError(AlphaZError, ValueError):
    """Malformed suite configuration or unknown check id."""
