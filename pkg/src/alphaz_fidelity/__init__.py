"""Two-parameter quantum alpha-z-fidelity: evaluation, closed-form extrema and verification."""

__version__ = "0.1.0"
