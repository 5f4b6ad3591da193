"""Report models."""

from .reports import (
    AssumptionCheck,
    KktReport,
    RunSummary,
    StepChange,
    ValidationReport,
)

__all__ = [
    "AssumptionCheck",
    "KktReport",
    "RunSummary",
    "StepChange",
    "ValidationReport",
]
