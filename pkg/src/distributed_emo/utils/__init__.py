"""Utility helpers shared across the distributed EMO package."""

from .log_config import ArrayFormatter, format_array, setup_logging

__all__ = ["ArrayFormatter", "format_array", "setup_logging"]
