"""Solver state and trajectory containers."""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from ..models.reports import StepChange


class Algorithm(str, Enum):
    """Which flow to simulate."""

    DPOFA = "dpofa"
    DDFA = "ddfa"


@dataclass
class SolverState:
    """Stacked state of all agents.

    :param primal: ``y`` for DPOFA, ``x`` for DDFA (length ``N``)
    :param lam: Stacked multipliers (length ``n m``)
    :param z: Stacked auxiliary variables (length ``n m``)
    :param t: Simulated time
    """

    primal: np.ndarray
    lam: np.ndarray
    z: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        self.primal = np.array(self.primal, dtype=float).reshape(-1)
        self.lam = np.array(self.lam, dtype=float).reshape(-1)
        self.z = np.array(self.z, dtype=float).reshape(-1)
        self.t = float(self.t)

    def copy(self) -> "SolverState":
        return SolverState(self.primal.copy(), self.lam.copy(), self.z.copy(), self.t)


@dataclass(frozen=True)
class TrajectorySample:
    """Telemetry recorded at one sampled step."""

    t: float
    x: np.ndarray
    f_value: float
    eq_residual_sq: float
    lambda_norm_sq: float
    z_norm_sq: float


@dataclass
class Trajectory:
    """Sampled run of one algorithm.

    ``samples`` are taken every ``sample_stride`` Euler steps starting at
    step 0; ``final_state`` and ``final_x`` hold the last state whether or
    not it fell on the stride. ``primal_norms_sq`` runs parallel to
    ``samples`` and tracks ``||y||^2`` or ``||x||^2``.
    """

    algorithm: Algorithm
    step: float
    sample_stride: int = 1
    samples: List[TrajectorySample] = field(default_factory=list)
    primal_norms_sq: List[float] = field(default_factory=list)
    final_state: Optional[SolverState] = None
    final_x: Optional[np.ndarray] = None
    steps: int = 0
    converged: bool = False
    stop_reason: str = "t_end"
    step_changes: List[StepChange] = field(default_factory=list)
    z_mass_drift: float = 0.0
    max_set_violation: float = 0.0

    @property
    def final_step(self) -> float:
        return self.step_changes[-1].new_step if self.step_changes else self.step

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def column(self, name: str) -> np.ndarray:
        """Values of one scalar telemetry field across the samples."""
        return np.array([getattr(s, name) for s in self.samples], dtype=float)
