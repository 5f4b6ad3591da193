"""Configuration settings for distributed EMO runs.

Defaults for the integrator, the stop rule, the centralized oracle and
logging. Settings are loaded from ``EMO_``-prefixed environment variables
and an optional .env file; experiment files and CLI flags override them
per run.
"""

from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables.

    :param log_level: Logging level for the application
    :type log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
    :param default_step: Forward Euler step size h
    :type default_step: float
    :param default_t_end: Simulated horizon
    :type default_t_end: float
    :param default_tol: Stop-rule tolerance on the KKT residuals
    :type default_tol: float
    :param stop_dwell: Consecutive steps the residuals must stay below tol
    :type stop_dwell: int
    :param sample_stride: Record telemetry every this many steps
    :type sample_stride: int
    :param chatter_window: Steps without residual progress before the
        step size is halved on nonsmooth problems
    :type chatter_window: int
    :param selection: Subgradient selection used by the dynamics
    :type selection: Literal["min_norm", "oracle"]
    :param output_dir: Default directory for telemetry and summaries
    :type output_dir: str
    :param oracle_max_iter: Iteration cap of the centralized oracle
    :type oracle_max_iter: int
    :param oracle_tol: KKT tolerance of the centralized oracle
    :type oracle_tol: float
    """

    model_config = SettingsConfigDict(
        env_prefix="EMO_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",  # Ignore extra fields in .env file
    )

    # Logging
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        "INFO", description="Logging level"
    )

    # Integrator
    default_step: float = Field(1e-2, description="Forward Euler step h")
    default_t_end: float = Field(100.0, description="Simulated horizon")
    default_tol: float = Field(
        1e-6, description="Stop-rule tolerance on KKT residuals"
    )
    stop_dwell: int = Field(
        100, description="Consecutive steps below tolerance before stopping"
    )
    sample_stride: int = Field(10, description="Telemetry sample stride")
    chatter_window: int = Field(
        10000, description="Steps without progress before halving h"
    )
    selection: Literal["min_norm", "oracle"] = Field(
        "min_norm", description="Subgradient selection for the dynamics"
    )

    # Outputs
    output_dir: str = Field("runs", description="Default output directory")

    # Centralized oracle
    oracle_max_iter: int = Field(
        2000, description="Iteration cap of the centralized oracle"
    )
    oracle_tol: float = Field(1e-10, description="Oracle KKT tolerance")

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_log_level(cls, v: str) -> str:
        """Accept log levels in any case.

        :param v: Raw log level value
        :type v: str
        :return: Upper-cased log level
        :rtype: str
        """
        return v.upper() if isinstance(v, str) else v

    @field_validator(
        "default_step", "default_t_end", "default_tol", "oracle_tol"
    )
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Reject non-positive step sizes, horizons and tolerances.

        :param v: Value to check
        :type v: float
        :return: The value when positive
        :rtype: float
        :raises ValueError: If the value is not positive
        """
        if v <= 0:
            raise ValueError("must be positive")
        return v

    @field_validator(
        "stop_dwell", "sample_stride", "chatter_window", "oracle_max_iter"
    )
    @classmethod
    def validate_count(cls, v: int) -> int:
        """Reject counts below one.

        :param v: Count to check
        :type v: int
        :return: The count when at least one
        :rtype: int
        :raises ValueError: If the count is below one
        """
        if v < 1:
            raise ValueError("must be at least 1")
        return v


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """Re-read settings from the current environment.

    :return: Fresh settings instance
    :rtype: Settings
    """
    return Settings()
