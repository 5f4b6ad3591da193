"""DPOFA and DDFA right-hand sides and the Euler integrator."""

from .integrator import (
    StopRule,
    default_initial_state,
    integrate,
    primal_output,
    stop_residuals,
)
from .rhs import (
    DdfaDerivative,
    DpofaDerivative,
    Operators,
    ddfa_rhs,
    dpofa_rhs,
    operators,
)
from .selection import (
    SELECTIONS,
    Selection,
    ddfa_selection,
    dpofa_selection,
    projected_residual,
)
from .state import Algorithm, SolverState, Trajectory, TrajectorySample

__all__ = [
    "Algorithm",
    "DdfaDerivative",
    "DpofaDerivative",
    "Operators",
    "SELECTIONS",
    "Selection",
    "SolverState",
    "StopRule",
    "Trajectory",
    "TrajectorySample",
    "ddfa_rhs",
    "ddfa_selection",
    "default_initial_state",
    "dpofa_rhs",
    "dpofa_selection",
    "integrate",
    "operators",
    "primal_output",
    "projected_residual",
    "stop_residuals",
]
