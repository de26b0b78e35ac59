"""
Configuration management for kdet.
"""

from functools import lru_cache
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Engine settings loaded from environment variables (prefix ``KDET_``)."""

    # Reproducibility
    seed: int = 0

    # Logging
    log_level: str = "WARNING"

    # Enumeration settings
    max_scenarios: int = 1_000_000
    enumerate_workers: int = 1

    # Output settings
    json_indent: int = 2

    model_config = SettingsConfigDict(
        env_prefix="KDET_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
