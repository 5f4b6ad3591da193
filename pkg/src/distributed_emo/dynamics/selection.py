"""Single-valued subgradient selections for the differential inclusions.

``oracle`` uses the objective's own selection (``sign`` with ``0`` at a
kink). ``min_norm`` picks, inside the subdifferential box, the element
that makes the primal velocity smallest. At a kink this is what keeps an
optimal point a fixed point of the discretized flow.
"""

from typing import Literal

import numpy as np

from ..problem.objectives import ObjectiveOracle
from ..problem.sets import ConvexSet

Selection = Literal["min_norm", "oracle"]
SELECTIONS = ("min_norm", "oracle")


def dpofa_selection(
    objective: ObjectiveOracle,
    x: np.ndarray,
    y: np.ndarray,
    v: np.ndarray,
    selection: Selection = "min_norm",
) -> np.ndarray:
    """Subgradient used in ``dy = -y + x - g + v`` with ``v = Wbar^T lam``.

    The min-norm choice is ``clip(x - y + v, lo, hi)``.
    """
    if selection == "oracle" or not objective.box_subdifferential:
        return objective.subgradient(x)
    lo, hi = objective.subdifferential(x)
    return np.clip(x - y + v, lo, hi)


def ddfa_selection(
    objective: ObjectiveOracle,
    x: np.ndarray,
    v: np.ndarray,
    selection: Selection = "min_norm",
) -> np.ndarray:
    """Subgradient used in ``p = P(x - g + v) - x``.

    For ``x`` in a box, ``p`` is nonincreasing in each ``g_k`` and vanishes
    at ``g_k = v_k``, so ``clip(v, lo, hi)`` minimizes ``|p_k|``.
    """
    if selection == "oracle" or not objective.box_subdifferential:
        return objective.subgradient(x)
    lo, hi = objective.subdifferential(x)
    return np.clip(v, lo, hi)


def projected_residual(
    objective: ObjectiveOracle,
    constraint_set: ConvexSet,
    x: np.ndarray,
    v: np.ndarray,
    selection: Selection = "min_norm",
) -> np.ndarray:
    """``P(x - g + v) - x`` for the chosen selection ``g``."""
    g = ddfa_selection(objective, x, v, selection)
    return constraint_set.project_array(x - g + v) - x
