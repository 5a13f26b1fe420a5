"""Configuration management for the alpha-z-fidelity toolkit."""

import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

# Numeric thresholds shared by every module.
HERMITIAN_TOL = 1e-12
PSD_CLAMP = 1e-10
TRACE_TOL = 1e-10
UNITARY_TOL = 1e-10
PROJECTOR_TOL = 1e-10
SUPPORT_INCLUSION_TOL = 1e-8
COMMUTE_TOL = 1e-12
RANK_FLOOR = 1e-13
CHANNEL_TOL = 1e-9
CHECK_TOL = 1e-9
FORM_CHECK_TOL = 1e-9

SEED_MAX = 2**64

_TRUTHY = {"1", "true", "yes", "on"}

_debug_checks = False


class Settings(BaseModel):
    """Runtime settings for the CLI and the verification suite."""

    seed: int = Field(default=42, ge=0, lt=SEED_MAX)
    tolerance: float = Field(default=CHECK_TOL, gt=0)
    log_level: str = "INFO"
    debug: bool = False

    @classmethod
    def from_env(
        cls,
        seed: Optional[int] = None,
        tolerance: Optional[float] = None,
        log_level: Optional[str] = None,
        debug: Optional[bool] = None,
    ) -> "Settings":
        """Create settings from explicit values, then AZFID_* variables, then defaults."""
        load_dotenv(override=False)

        if seed is None:
            raw = os.getenv("AZFID_SEED")
            if raw:
                try:
                    seed = int(raw, 0)
                except ValueError:
                    raise ValueError(f"AZFID_SEED must be an integer, got {raw!r}")
        if seed is not None and not 0 <= seed < SEED_MAX:
            raise ValueError(f"seed must lie in [0, 2^64), got {seed}")

        if tolerance is None:
            raw = os.getenv("AZFID_TOLERANCE")
            if raw:
                try:
                    tolerance = float(raw)
                except ValueError:
                    raise ValueError(f"AZFID_TOLERANCE must be a number, got {raw!r}")
        if tolerance is not None and not tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {tolerance}")

        if log_level is None:
            log_level = os.getenv("AZFID_LOG_LEVEL") or None

        if debug is None:
            raw = os.getenv("AZFID_DEBUG")
            debug = bool(raw) and raw.strip().lower() in _TRUTHY

        values = {
            "seed": seed,
            "tolerance": tolerance,
            "log_level": log_level.upper() if log_level else None,
            "debug": debug,
        }
        return cls(**{k: v for k, v in values.items() if v is not None})

    def activate(self) -> None:
        """Apply process-wide toggles carried by these settings."""
        set_debug_checks(self.debug)


def set_debug_checks(enabled: bool) -> None:
    global _debug_checks
    _debug_checks = enabled


def debug_checks_enabled() -> bool:
    """True when the symmetric-form assertion in the fidelity evaluator is active."""
    if _debug_checks:
        return True
    raw = os.getenv("AZFID_DEBUG", "")
    return raw.strip().lower() in _TRUTHY
