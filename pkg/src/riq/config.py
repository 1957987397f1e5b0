"""Configuration management for RIQ."""

from __future__ import annotations

import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any

from .models.enums import Eps0Policy
from .models.quantized import DEFAULT_EPS0, DEFAULT_RBITS

MAX_PRECISION = 15


def get_home_dir() -> Path:
    """Get RIQ home directory.

    Precedence:
    1. RIQ_HOME environment variable
    2. Default: ~/.riq
    """
    env_home = os.environ.get("RIQ_HOME")
    if env_home:
        return Path(env_home)
    return Path.home() / ".riq"


def _parse_eps0(value: Any) -> float:
    eps0 = float(value)
    if not 0.0 <= eps0 < 1.0:
        raise ValueError(f"Invalid eps0: {value}. Must be in [0, 1)")
    return eps0


def _parse_policy(value: Any) -> str:
    try:
        return Eps0Policy(value).value
    except ValueError:
        choices = ", ".join(p.value for p in Eps0Policy)
        raise ValueError(f"Invalid eps0_policy: {value}. Must be one of {choices}") from None


def _parse_positive_int(value: Any, low: int = 1, high: int | None = None) -> int:
    number = int(value)
    if number < low or (high is not None and number > high):
        bound = f"[{low}, {high}]" if high is not None else f">= {low}"
        raise ValueError(f"Invalid value: {value}. Must be an integer {bound}")
    return number


def _parse_threshold(value: Any) -> float:
    number = float(value)
    if not number > 1:
        raise ValueError(f"Invalid stop_threshold: {value}. Must be > 1")
    return number


# section -> name -> (parser, default)
_SCHEMA: dict[str, dict[str, tuple[Any, Any]]] = {
    "quant": {
        "eps0": (_parse_eps0, DEFAULT_EPS0),
        "eps0_policy": (_parse_policy, Eps0Policy.CONSTANT.value),
        "rbits": (lambda v: _parse_positive_int(v, 1, 32), DEFAULT_RBITS),
    },
    "search": {
        "stop_threshold": (_parse_threshold, 3.0),
    },
    "coder": {
        "precision": (lambda v: _parse_positive_int(v, 1, MAX_PRECISION), 12),
    },
    "calib": {
        "count": (_parse_positive_int, 4),
        "seed": (lambda v: _parse_positive_int(v, 0), 0),
    },
    "analysis": {
        "grid_points": (lambda v: _parse_positive_int(v, 1), 16),
    },
}

_ENV_KEYS = {
    "quant.eps0": "RIQ_EPS0",
    "search.stop_threshold": "RIQ_STOP_THRESHOLD",
    "coder.precision": "RIQ_PRECISION",
}


class Config:
    """RIQ configuration.

    Configuration is loaded with the following precedence (highest to lowest):
    1. CLI options (passed directly to ``resolve``)
    2. Environment variables (RIQ_EPS0, RIQ_STOP_THRESHOLD, RIQ_PRECISION)
    3. Config file (~/.riq/config.toml or $RIQ_HOME/config.toml)
    4. Default values

    Set RIQ_HOME to change the base directory.
    """

    @property
    def config_dir(self) -> Path:
        """Get the config directory (respects RIQ_HOME)."""
        return get_home_dir()

    @property
    def config_path(self) -> Path:
        """Get the config file path."""
        return self.config_dir / "config.toml"

    def __init__(self) -> None:
        """Initialize configuration."""
        self._file_config = self._load_config_file()

    def _load_config_file(self) -> dict:
        """Load configuration from file if it exists."""
        if not self.config_path.exists():
            return {}
        try:
            with open(self.config_path, "rb") as f:
                return tomllib.load(f)
        except (OSError, tomllib.TOMLDecodeError):
            return {}

    @staticmethod
    def _split(key: str) -> tuple[str, str]:
        parts = key.split(".")
        if len(parts) != 2:
            raise ValueError(f"Invalid key: {key}")
        section, name = parts
        if section not in _SCHEMA:
            raise ValueError(f"Unknown section: {section}")
        if name not in _SCHEMA[section]:
            raise ValueError(f"Unknown {section} key: {name}")
        return section, name

    def resolve(self, key: str, cli_value: Any = None) -> Any:
        """Resolve a value with precedence: CLI > env > file > default.

        Invalid values from any source fall through to the next one.

        Args:
            key: Config key in dot notation (e.g., "quant.eps0")
            cli_value: Value given on the command line (highest priority)

        Returns:
            The parsed value
        """
        return self.resolve_with_source(key, cli_value)[0]

    def resolve_with_source(self, key: str, cli_value: Any = None) -> tuple[Any, str]:
        """Resolve a value and name the source it came from.

        Returns:
            (value, source) with source one of "cli", "env", "file", "default"
        """
        section, name = self._split(key)
        parser, default = _SCHEMA[section][name]

        candidates = [
            ("cli", cli_value),
            ("env", os.environ.get(_ENV_KEYS[key]) if key in _ENV_KEYS else None),
            ("file", self._file_config.get(section, {}).get(name)),
        ]
        for source, candidate in candidates:
            if candidate is None or candidate == "":
                continue
            try:
                return parser(candidate), source
            except (TypeError, ValueError):
                continue
        return default, "default"

    def get_value(self, key: str) -> Any:
        """Get a value set in the config file (None if unset)."""
        section, name = self._split(key)
        return self._file_config.get(section, {}).get(name)

    def set_value(self, key: str, value: str) -> None:
        """Set a configuration value.

        Args:
            key: Config key in dot notation (e.g., "search.stop_threshold")
            value: Value to set

        Raises:
            ValueError: If key is invalid or value is not allowed
        """
        section, name = self._split(key)
        parser, _ = _SCHEMA[section][name]
        parsed = parser(value)

        if section not in self._file_config:
            self._file_config[section] = {}
        self._file_config[section][name] = parsed

    def get_all(self) -> dict:
        """Get all configuration values set in the file."""
        return self._file_config.copy()

    @staticmethod
    def defaults() -> dict[str, Any]:
        """All keys with their default values."""
        return {
            f"{section}.{name}": default
            for section, names in _SCHEMA.items()
            for name, (_, default) in names.items()
        }

    # Convenience accessors

    def get_eps0(self, cli_eps0: float | None = None) -> float:
        return self.resolve("quant.eps0", cli_eps0)

    def get_eps0_policy(self, cli_policy: str | None = None) -> Eps0Policy:
        return Eps0Policy(self.resolve("quant.eps0_policy", cli_policy))

    def get_stop_threshold(self, cli_threshold: float | None = None) -> float:
        return self.resolve("search.stop_threshold", cli_threshold)

    def get_precision(self, cli_precision: int | None = None) -> int:
        return self.resolve("coder.precision", cli_precision)

    def save(self) -> None:
        """Save configuration to file."""
        import tomli_w

        self.config_dir.mkdir(parents=True, exist_ok=True)
        with open(self.config_path, "wb") as f:
            tomli_w.dump(self._file_config, f)


# Global config instance
_config: Config | None = None


def get_config() -> Config:
    """Get the global config instance (lazy initialization)."""
    global _config
    if _config is None:
        _config = Config()
    return _config


def reset_config() -> None:
    """Drop the cached global config (the next get_config re-reads the file)."""
    global _config
    _config = None
