"""
Configuration management for the AoT scheduler.

Uses pydantic-settings to load configuration from environment variables
with sensible defaults.
"""

from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Application settings with environment variable support.

    Configuration values can be overridden by environment variables.
    For example, AOT_NODE_LIMIT environment variable will override node_limit.
    """

    model_config = SettingsConfigDict(
        env_prefix="AOT_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    # Output configuration
    output_dir: Path = Field(
        default=Path("results"),
        description="Directory receiving instance files, CSV tables and traces"
    )

    # Scheduling horizon
    horizon: int = Field(
        default=200,
        ge=1,
        description="Number of slots T available to every scheduler"
    )

    # Exact search limits
    node_limit: int = Field(
        default=2_000_000,
        ge=1,
        description="Maximum number of label expansions before the exact search gives up"
    )

    delay_objective: Literal["makespan", "sum"] = Field(
        default="makespan",
        description="Completion-time objective of the delay-optimal strategy"
    )

    # Experiment execution
    workers: int = Field(
        default=1,
        ge=1,
        description="Worker processes used for experiment grids"
    )

    log_level: str = Field(
        default="INFO",
        description="Logging level name"
    )
