"""
Unit tests for Config and parameter-object construction.
"""

from dataclasses import dataclass
from pathlib import Path

import pytest

from src.config import Config, build_params
from src.exceptions import ParameterError


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in (
        "ROADMAP_LOG_DIR",
        "ROADMAP_LOG_LEVEL",
        "ROADMAP_LOG_TO_FILE",
        "ROADMAP_DEFAULT_SEED",
    ):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setattr("src.config.load_dotenv", lambda: False)


class TestConfigFromEnv:
    """Tests for Config.from_env() class method."""

    def test_from_env_defaults(self):
        """Test defaults when no variables are set."""
        config = Config.from_env()

        assert config.log_dir == Path("logs")
        assert config.log_level == "INFO"
        assert config.log_to_file is True
        assert config.default_seed == 0

    def test_from_env_with_all_variables(self, monkeypatch):
        """Test every variable is read and converted."""
        monkeypatch.setenv("ROADMAP_LOG_DIR", "/tmp/roadmap-logs")
        monkeypatch.setenv("ROADMAP_LOG_LEVEL", "debug")
        monkeypatch.setenv("ROADMAP_LOG_TO_FILE", "no")
        monkeypatch.setenv("ROADMAP_DEFAULT_SEED", "42")

        config = Config.from_env()

        assert config.log_dir == Path("/tmp/roadmap-logs")
        assert config.log_level == "DEBUG"
        assert config.log_to_file is False
        assert config.default_seed == 42

    def test_from_env_bad_seed(self, monkeypatch):
        """Test ValueError names the malformed seed variable."""
        monkeypatch.setenv("ROADMAP_DEFAULT_SEED", "seven")

        with pytest.raises(ValueError, match="ROADMAP_DEFAULT_SEED"):
            Config.from_env()

    def test_from_env_bad_bool(self, monkeypatch):
        """Test ValueError names the malformed flag variable."""
        monkeypatch.setenv("ROADMAP_LOG_TO_FILE", "maybe")

        with pytest.raises(ValueError, match="ROADMAP_LOG_TO_FILE"):
            Config.from_env()

    def test_from_env_loads_dotenv(self, mocker):
        """Test the .env file is consulted."""
        loader = mocker.patch("src.config.load_dotenv")

        Config.from_env()

        loader.assert_called_once()


class TestConfigValidation:
    """Tests for Config.validate() method."""

    def test_validate_defaults(self):
        """Test default configuration validates."""
        Config().validate()

    def test_validate_unknown_level(self):
        """Test unknown log levels are rejected."""
        with pytest.raises(ValueError, match="Invalid log level"):
            Config(log_level="CHATTY").validate()

    def test_validate_negative_seed(self):
        """Test negative default seeds are rejected."""
        with pytest.raises(ValueError, match="non-negative"):
            Config(default_seed=-1).validate()


@dataclass(frozen=True)
class _Knobs:
    alpha: float = 1.0
    steps: int = 3


class TestBuildParams:
    """Tests for build_params()."""

    def test_empty_mapping_gives_defaults(self):
        """Test None and {} both produce the defaults."""
        assert build_params(_Knobs, None) == _Knobs()
        assert build_params(_Knobs, {}) == _Knobs()

    def test_known_keys_are_applied(self):
        """Test provided keys override defaults."""
        assert build_params(_Knobs, {"steps": 7}) == _Knobs(steps=7)

    def test_unknown_keys_rejected(self):
        """Test typos are reported instead of ignored."""
        with pytest.raises(ParameterError, match="Unknown _Knobs keys: alpah"):
            build_params(_Knobs, {"alpah": 2.0})

    def test_parameter_error_is_value_error(self):
        """Test ParameterError can be caught as ValueError."""
        with pytest.raises(ValueError):
            build_params(_Knobs, {"nope": 1})
