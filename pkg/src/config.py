from typing import Any, Dict
from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

OUTPUT_FORMATS = ("json", "csv", "bfile", "text")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Config(BaseSettings):
    # Series settings
    ORDER: int = 64
    KERNEL_CACHE_SIZE: int = 32

    # Numeric settings
    DIGITS: int = 50

    # Oracle settings
    ORACLE_LIMIT: int = 16

    # Output settings
    FORMAT: str = "text"
    LOG_LEVEL: str = "WARNING"

    # Worker settings
    MAX_WORKERS: int = 1

    model_config = SettingsConfigDict(
        env_prefix="SKM_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    @field_validator("KERNEL_CACHE_SIZE", "MAX_WORKERS")
    @classmethod
    def positive_number(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("This value must be positive")
        return v

    @field_validator("ORDER", "ORACLE_LIMIT")
    @classmethod
    def non_negative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("This value cannot be negative")
        return v

    @field_validator("DIGITS")
    @classmethod
    def enough_digits(cls, v: int) -> int:
        if v < 15:
            raise ValueError("At least 15 decimal digits are required")
        return v

    @field_validator("FORMAT")
    @classmethod
    def known_format(cls, v: str) -> str:
        v = v.strip().lower()
        if v not in OUTPUT_FORMATS:
            raise ValueError(f"Unknown output format {v!r}")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def known_level(cls, v: str) -> str:
        v = v.strip().upper()
        if v not in LOG_LEVELS:
            raise ValueError(f"Unknown log level {v!r}")
        return v

    def save_to_env_file(self, path: str = ".env") -> None:
        defaults = type(self).model_fields
        with open(path, "w") as env_file:
            for field, value in self.model_dump().items():
                if value != defaults[field].default:
                    env_file.write(f"SKM_{field}={value}\n")


def get_config(**overrides: Any) -> Config:
    """
    Build the configuration.

    Keyword overrides (typically command-line flags) win over ``SKM_*``
    environment variables, which win over the ``.env`` file and the defaults.
    ``None`` overrides are ignored so unset flags fall through.
    """
    explicit: Dict[str, Any] = {k: v for k, v in overrides.items() if v is not None}
    return Config(**explicit)
