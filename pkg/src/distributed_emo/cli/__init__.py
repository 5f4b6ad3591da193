"""Command-line runner and telemetry files."""

from .runner import RunOutcome, build_parser, main, run_experiment, run_single
from .telemetry import (
    read_telemetry,
    telemetry_header,
    write_summary,
    write_telemetry,
)

__all__ = [
    "RunOutcome",
    "build_parser",
    "main",
    "read_telemetry",
    "run_experiment",
    "run_single",
    "telemetry_header",
    "write_summary",
    "write_telemetry",
]
