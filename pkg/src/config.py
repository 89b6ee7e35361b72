"""Run settings.

Precedence: command-line flags > the JSON file named by NAQC_CONFIG >
built-in defaults. A ``.env`` file in the working directory is loaded first,
so NAQC_CONFIG and NAQC_LOG_LEVEL may live there.
"""

import json
import logging
from os import environ
from typing import Any, Dict, Optional

from dotenv import find_dotenv, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.quantum.errors import NaqcError

logger = logging.getLogger(__name__)

CONFIG_ENV = "NAQC_CONFIG"
LOG_LEVEL_ENV = "NAQC_LOG_LEVEL"


class ConfigError(NaqcError):
    """The configuration file is missing, unreadable or malformed."""


class NaqcSettings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    grid_theta: int = Field(default=64, ge=2)
    grid_phi: int = Field(default=32, ge=1)
    tolerance: float = Field(default=1e-9, gt=0)
    seed: int = Field(default=0, ge=0)
    log_level: str = "INFO"
    max_refine_evaluations: int = Field(default=2000, ge=1)
    refine_tolerance: float = Field(default=1e-8, gt=0)

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"unknown log level {value!r}")
        return level

    def merged(self, overrides: Dict[str, Any]) -> "NaqcSettings":
        """Copy with every non-None override applied and re-validated."""
        values = self.model_dump()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return NaqcSettings(**values)


def load_settings(path: Optional[str] = None) -> NaqcSettings:
    load_dotenv(find_dotenv(usecwd=True))
    path = path or environ.get(CONFIG_ENV)
    values: Dict[str, Any] = {}
    if path:
        try:
            with open(path, "r") as f:
                values = json.load(f)
        except OSError as exc:
            raise ConfigError(f"cannot read {CONFIG_ENV} file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        if not isinstance(values, dict):
            raise ConfigError(f"{path} must hold a JSON object")
        logger.debug(f"Loaded settings from {path}")
    if environ.get(LOG_LEVEL_ENV):
        values["log_level"] = environ[LOG_LEVEL_ENV]
    return NaqcSettings(**values)
