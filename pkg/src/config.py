"""Environment-driven settings for the benchmark harness."""

import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from src.errors import ConfigurationError

SCHEME_IDS = ("paillier", "debug")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ChemSettings(BaseModel):
    """Settings read from ``CHEM_*`` environment variables (and ``.env``)."""

    seed: Optional[int] = Field(None, description="Global seed override (CHEM_SEED)")
    log_level: str = Field("INFO", description="Root log level (CHEM_LOG_LEVEL)")
    key_bits: int = Field(2048, ge=16, description="Default key size (CHEM_KEY_BITS)")
    scheme: str = Field("paillier", description="Default scheme id (CHEM_SCHEME)")
    output_dir: str = Field("reports", description="Default report directory (CHEM_OUTPUT_DIR)")

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"unknown log level {value!r}")
        return level

    @field_validator("scheme")
    @classmethod
    def _known_scheme(cls, value: str) -> str:
        if value not in SCHEME_IDS:
            raise ValueError(f"unknown scheme {value!r}; expected one of {SCHEME_IDS}")
        return value

    def resolve_seed(self, cli_seed: Optional[int]) -> Optional[int]:
        """CHEM_SEED wins over a command-line seed."""
        return self.seed if self.seed is not None else cli_seed


def load_settings(dotenv_path: Optional[str] = None) -> ChemSettings:
    """
    Load settings from the process environment after applying ``.env``.

    Args:
        dotenv_path: Optional explicit .env path (default: search upwards)

    Returns:
        Validated ChemSettings
    """
    load_dotenv(dotenv_path=dotenv_path, override=False)

    raw = {
        "seed": os.getenv("CHEM_SEED"),
        "log_level": os.getenv("CHEM_LOG_LEVEL"),
        "key_bits": os.getenv("CHEM_KEY_BITS"),
        "scheme": os.getenv("CHEM_SCHEME"),
        "output_dir": os.getenv("CHEM_OUTPUT_DIR"),
    }
    values = {key: value for key, value in raw.items() if value not in (None, "")}
    try:
        return ChemSettings(**values)
    except ValidationError as exc:
        raise ConfigurationError(f"Invalid CHEM_* environment: {exc}") from exc
