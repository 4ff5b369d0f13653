"""
Configuration management using Pydantic Settings.
Loads environment variables with validation and defaults.
"""

from functools import lru_cache
from pydantic_settings import BaseSettings
from pydantic import Field


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Application
    app_name: str = Field(default="Staircase")
    version: str = Field(default="1.0.0")
    debug: bool = Field(default=False)
    log_level: str = Field(default="INFO")

    # Result cache (STAIRCASE_CACHE_DIR)
    staircase_cache_dir: str = Field(default=".staircase_cache")
    cache_enabled: bool = Field(default=True)

    # Computation defaults
    default_order: str = Field(default="deglex:x1<x2")
    default_d_schedule: str = Field(default="1,2,4,8")
    default_max_2vol: int = Field(default=15)

    # Polygon enumeration box [0, factor * max_2vol]^2; canonical forms outside it are counted and logged, never dropped
    normalization_box_factor: int = Field(default=4)

    # Atlas worker processes (1 = serial)
    atlas_workers: int = Field(default=1)

    # Property suite
    check_seed: int = Field(default=0)
    check_cases: int = Field(default=12)

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = False


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


# Convenience export
settings = get_settings()
