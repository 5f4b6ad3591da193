"""Exact projections onto constraint sets."""

from .operators import ProjectionResult, merit, merit_gradient, project

__all__ = ["ProjectionResult", "merit", "merit_gradient", "project"]
