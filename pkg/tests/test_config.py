"""Tests for configuration management."""

import logging
import os
from unittest.mock import patch

import pytest

from alphaz_fidelity.config import CHECK_TOL, Settings, debug_checks_enabled, set_debug_checks
from alphaz_fidelity.logging_config import get_logger, setup_logging


class TestSettings:
    """Test settings resolution from arguments, environment and defaults."""

    @patch.dict(os.environ, {}, clear=True)
    def test_defaults(self):
        """Test defaults when nothing is configured."""
        settings = Settings.from_env()

        assert settings.seed == 42
        assert settings.tolerance == CHECK_TOL
        assert settings.log_level == "INFO"
        assert settings.debug is False

    @patch.dict(os.environ, {"AZFID_SEED": "7", "AZFID_TOLERANCE": "1e-6", "AZFID_LOG_LEVEL": "debug"}, clear=True)
    def test_from_env(self):
        """Test AZFID_* variables are picked up."""
        settings = Settings.from_env()

        assert settings.seed == 7
        assert settings.tolerance == 1e-6
        assert settings.log_level == "DEBUG"

    @patch.dict(os.environ, {"AZFID_SEED": "0x10"}, clear=True)
    def test_seed_accepts_hex(self):
        """Test the seed is parsed with base prefixes."""
        assert Settings.from_env().seed == 16

    @patch.dict(os.environ, {"AZFID_SEED": "7"}, clear=True)
    def test_explicit_values_win(self):
        """Test explicit arguments override the environment."""
        settings = Settings.from_env(seed=3, tolerance=1e-4, log_level="warning")

        assert settings.seed == 3
        assert settings.tolerance == 1e-4
        assert settings.log_level == "WARNING"

    @patch.dict(os.environ, {"AZFID_SEED": "abc"}, clear=True)
    def test_bad_seed_in_env(self):
        """Test a non-integer AZFID_SEED is rejected."""
        with pytest.raises(ValueError, match="AZFID_SEED must be an integer"):
            Settings.from_env()

    @patch.dict(os.environ, {}, clear=True)
    def test_seed_out_of_range(self):
        """Test seeds outside [0, 2^64) are rejected."""
        with pytest.raises(ValueError, match="seed must lie"):
            Settings.from_env(seed=-1)
        with pytest.raises(ValueError, match="seed must lie"):
            Settings.from_env(seed=2**64)

    @patch.dict(os.environ, {"AZFID_TOLERANCE": "-1"}, clear=True)
    def test_non_positive_tolerance(self):
        """Test a non-positive tolerance is rejected."""
        with pytest.raises(ValueError, match="tolerance must be positive"):
            Settings.from_env()

    @pytest.mark.parametrize("raw,expected", [("1", True), ("yes", True), ("On", True), ("0", False), ("no", False)])
    def test_debug_flag_from_env(self, raw, expected):
        """Test AZFID_DEBUG truthy values."""
        with patch.dict(os.environ, {"AZFID_DEBUG": raw}, clear=True):
            assert Settings.from_env().debug is expected


class TestDebugChecks:
    """Test the process-wide symmetric-form check toggle."""

    @patch.dict(os.environ, {}, clear=True)
    def test_toggle(self):
        """Test enabling and disabling the check."""
        assert debug_checks_enabled() is False
        set_debug_checks(True)
        assert debug_checks_enabled() is True
        set_debug_checks(False)
        assert debug_checks_enabled() is False

    @patch.dict(os.environ, {"AZFID_DEBUG": "true"}, clear=True)
    def test_env_enables_check(self):
        """Test AZFID_DEBUG turns the check on without activation."""
        assert debug_checks_enabled() is True

    @patch.dict(os.environ, {}, clear=True)
    def test_activate(self):
        """Test Settings.activate applies the debug flag."""
        Settings.from_env(debug=True).activate()
        assert debug_checks_enabled() is True


class TestLogging:
    """Test logging setup."""

    def test_setup_logging_levels(self):
        """Test the requested level is applied, and debug overrides it."""
        logger = setup_logging(level="WARNING")
        assert logger.name == "alphaz_fidelity"
        assert logging.getLogger().level == logging.WARNING

        setup_logging(level="WARNING", debug=True)
        assert logging.getLogger().level == logging.DEBUG

    def test_setup_logging_replaces_handlers(self):
        """Test repeated setup leaves a single handler."""
        setup_logging()
        setup_logging()
        assert len(logging.getLogger().handlers) == 1

    def test_get_logger(self):
        """Test named and default loggers."""
        assert get_logger().name == "alphaz_fidelity"
        assert get_logger("alphaz_fidelity.orbits").name == "alphaz_fidelity.orbits"
