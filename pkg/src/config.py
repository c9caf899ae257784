"""
Configuration management for the road-map planning benchmark.
"""

import dataclasses
import logging
import os
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from dotenv import load_dotenv

from src.exceptions import ParameterError

_TRUE_VALUES = {"1", "true", "yes", "on"}
_FALSE_VALUES = {"0", "false", "no", "off"}


@dataclass
class Config:
    """Runtime settings for the command-line tools."""

    log_dir: Path = Path("logs")
    log_level: str = "INFO"
    log_to_file: bool = True
    default_seed: int = 0

    @classmethod
    def from_env(cls) -> "Config":
        """
        Load configuration from environment variables (and a .env file if present).

        Returns:
            Config: Configuration instance with values from environment

        Raises:
            ValueError: If a variable is present but malformed
        """
        load_dotenv()

        config = cls()
        if log_dir := os.getenv("ROADMAP_LOG_DIR"):
            config.log_dir = Path(log_dir)
        if log_level := os.getenv("ROADMAP_LOG_LEVEL"):
            config.log_level = log_level.upper()
        if (log_to_file := os.getenv("ROADMAP_LOG_TO_FILE")) is not None:
            config.log_to_file = _parse_bool("ROADMAP_LOG_TO_FILE", log_to_file)
        if (seed := os.getenv("ROADMAP_DEFAULT_SEED")) is not None:
            try:
                config.default_seed = int(seed)
            except ValueError as e:
                raise ValueError(f"ROADMAP_DEFAULT_SEED must be an integer, got '{seed}'") from e
        return config

    def validate(self) -> None:
        """
        Validate configuration values.

        Raises:
            ValueError: If configuration values are invalid
        """
        if self.log_level not in logging.getLevelNamesMapping():
            raise ValueError(f"Invalid log level: {self.log_level}")
        if self.default_seed < 0:
            raise ValueError(f"Default seed must be non-negative: {self.default_seed}")


def _parse_bool(name: str, raw: str) -> bool:
    value = raw.strip().lower()
    if value in _TRUE_VALUES:
        return True
    if value in _FALSE_VALUES:
        return False
    raise ValueError(f"{name} must be a boolean flag, got '{raw}'")


def build_params[T](cls: type[T], mapping: Mapping[str, Any] | None) -> T:
    """
    Build a parameter dataclass from a JSON-style mapping.

    Unknown keys are rejected rather than ignored.

    Raises:
        ParameterError: If the mapping holds keys the dataclass does not define
    """
    if not mapping:
        return cls()
    known = {f.name for f in dataclasses.fields(cls)}  # type: ignore[arg-type]
    unknown = sorted(set(mapping) - known)
    if unknown:
        raise ParameterError(f"Unknown {cls.__name__} keys: {', '.join(unknown)}")
    return cls(**dict(mapping))
