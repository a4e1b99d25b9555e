"""
Toolkit settings loaded from environment variables and config files.

Uses pydantic-settings to validate and type-cast values. The CLI layers a
plain ``KEY=VALUE`` file (``--config``) and explicit flags on top:

    explicit flag  >  config file  >  environment / .env  >  defaults
"""

from functools import lru_cache
from pathlib import Path
from typing import Any, Literal

from dotenv import dotenv_values
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.core.exceptions import ValidationException
from app.core.logging import get_logger

logger = get_logger(__name__)


class Settings(BaseSettings):
    """Centralised toolkit configuration."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # ── Application ───────────────────────────────────────────────────
    app_name: str = "QFILTER_ORTHO"
    app_env: Literal["development", "staging", "production"] = "development"
    app_version: str = "1.0.0"

    # ── HTTP server ───────────────────────────────────────────────────
    host: str = "127.0.0.1"
    port: int = 8000

    # ── Logging ───────────────────────────────────────────────────────
    log_level: str = "INFO"
    log_format: Literal["json", "console"] = "console"

    # ── Experiment defaults ───────────────────────────────────────────
    # Absolute count rates are not reported for the experiment; 1e5 per
    # basis setting only approximates its statistics.
    default_shots: int = Field(default=100_000, ge=1)
    default_seed: int = Field(default=2014, ge=0)
    default_visibility: float = Field(default=0.94, ge=0.0, le=1.0)
    default_attenuation_error: float = 0.0
    default_mean_source: Literal["known", "measured"] = "known"
    default_theta_step_deg: float = Field(default=5.0, gt=0.0, le=90.0)
    default_random_maps: int = Field(default=1000, ge=1)
    default_haar_samples: int = Field(default=100_000, ge=2)

    # ── Numerics ──────────────────────────────────────────────────────
    mle_max_iterations: int = Field(default=5000, ge=1)
    mle_tolerance: float = Field(default=1e-10, gt=0.0)

    @property
    def is_development(self) -> bool:
        return self.app_env == "development"


@lru_cache
def get_settings() -> Settings:
    """
    Cached singleton - settings are read once and reused.
    """
    return Settings()


def load_config_file(path: str | Path) -> dict[str, Any]:
    """
    Read a plain ``KEY=VALUE`` config file.

    Keys are normalised to CLI flag form with underscores (``--shots`` and
    ``shots`` are the same key; ``attenuation-error`` becomes
    ``attenuation_error``). Empty values are dropped.

    Raises:
        ValidationException: If the file does not exist.
    """
    config_path = Path(path)
    if not config_path.is_file():
        raise ValidationException(
            message=f"Config file '{config_path}' not found.",
            details={"path": str(config_path)},
        )

    values: dict[str, Any] = {}
    for raw_key, raw_value in dotenv_values(config_path).items():
        if raw_value is None or raw_value == "":
            continue
        key = raw_key.strip().lstrip("-").replace("-", "_").lower()
        values[key] = raw_value.strip()

    logger.debug("Config file loaded", extra={"path": str(config_path), "keys": sorted(values)})
    return values


def merge_options(
    flags: dict[str, Any],
    file_values: dict[str, Any],
    known: set[str],
) -> dict[str, Any]:
    """
    Combine config-file values with explicitly given flags; flags win.

    ``flags`` should only hold options the user actually passed (``None``
    entries are treated as "not given"). Keys outside ``known`` are ignored
    with a warning.
    """
    merged: dict[str, Any] = {}
    for key, value in file_values.items():
        if key not in known:
            logger.warning("Ignoring unknown config key", extra={"key": key})
            continue
        merged[key] = value
    merged.update({k: v for k, v in flags.items() if v is not None})
    return merged
