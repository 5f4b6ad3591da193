"""Euclidean projections and the projection merit function."""

from dataclasses import dataclass

import numpy as np

from ..problem.sets import ConvexSet


@dataclass(frozen=True)
class ProjectionResult:
    """Projection of a point onto a set.

    :param point: The projection ``P(u)``
    :param distance_sq: Squared distance ``||u - P(u)||^2``
    """

    point: np.ndarray
    distance_sq: float


def project(constraint_set: ConvexSet, u: np.ndarray) -> ProjectionResult:
    """Project ``u`` onto ``constraint_set``.

    :raises DimensionError: If ``u`` does not match the set dimension
    """
    u = constraint_set.check_dim(u, "u")
    point = constraint_set.project_array(u)
    return ProjectionResult(
        point=point, distance_sq=float(np.sum((u - point) ** 2))
    )


def merit(constraint_set: ConvexSet, x: np.ndarray, y_ref: np.ndarray) -> float:
    """Merit ``1/2 (||x - P(y_ref)||^2 - ||x - P(x)||^2)``.

    Bounded below by ``1/2 ||P(x) - P(y_ref)||^2``; its gradient in ``x``
    is ``P(x) - P(y_ref)``.
    """
    x = constraint_set.check_dim(x, "x")
    y_ref = constraint_set.check_dim(y_ref, "y_ref")
    p_ref = constraint_set.project_array(y_ref)
    p_x = constraint_set.project_array(x)
    return 0.5 * (float(np.sum((x - p_ref) ** 2)) - float(np.sum((x - p_x) ** 2)))


def merit_gradient(
    constraint_set: ConvexSet, x: np.ndarray, y_ref: np.ndarray
) -> np.ndarray:
    """Gradient of :func:`merit` with respect to ``x``."""
    x = constraint_set.check_dim(x, "x")
    y_ref = constraint_set.check_dim(y_ref, "y_ref")
    return constraint_set.project_array(x) - constraint_set.project_array(y_ref)
