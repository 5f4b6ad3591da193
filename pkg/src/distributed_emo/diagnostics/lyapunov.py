"""Lyapunov functions of both flows and helpers to check them on runs."""

from dataclasses import dataclass, field
from typing import Iterable, List, Sequence

import numpy as np

from ..dynamics.state import Algorithm, SolverState, Trajectory
from ..exceptions import PreconditionError
from ..network.graph import CommGraph
from ..problem.model import EmoProblem
from ..projection.operators import merit
from .equilibrium import Equilibrium

MEMBERSHIP_TOLERANCE = 1e-9


def _quadratic_tail(state: SolverState, eq: Equilibrium) -> float:
    dl = state.lam - eq.lambda_star
    dz = state.z - eq.z_star
    return 0.5 * float(dl @ dl) + 0.5 * float(dz @ dz)


def lyapunov_dpofa(
    problem: EmoProblem,
    graph: CommGraph,
    state: SolverState,
    eq: Equilibrium,
) -> float:
    """``1/2 (||y - P(y*)||^2 - ||y - P(y)||^2) + 1/2 ||lam - lam*||^2
    + 1/2 ||z - z*||^2``.

    :raises PreconditionError: If ``eq`` carries no ``y_star``
    """
    if eq.y_star is None:
        raise PreconditionError(
            "DPOFA Lyapunov function needs an equilibrium with y_star",
            "y_star",
        )
    Omega = problem.stacked.Omega
    return merit(Omega, state.primal, eq.y_star) + _quadratic_tail(state, eq)


def lyapunov_ddfa(
    problem: EmoProblem,
    graph: CommGraph,
    state: SolverState,
    eq: Equilibrium,
) -> float:
    """``f(x) - f(x*) + lam*^T (d - Wbar x) + 1/2 ||x - x*||^2
    + 1/2 ||lam - lam*||^2 + 1/2 ||z - z*||^2``.

    Positive definite on the constraint set only.

    :raises PreconditionError: If ``x`` is not in the constraint set
    """
    form = problem.stacked
    x = state.primal
    if not form.Omega.contains(x, MEMBERSHIP_TOLERANCE):
        raise PreconditionError(
            "DDFA Lyapunov function is only defined on the constraint set",
            "x",
        )
    dx = x - eq.x_star
    return (
        form.objective.value(x)
        - form.objective.value(eq.x_star)
        + float(eq.lambda_star @ (form.d - form.Wbar @ x))
        + 0.5 * float(dx @ dx)
        + _quadratic_tail(state, eq)
    )


def lyapunov(
    problem: EmoProblem,
    graph: CommGraph,
    algorithm: Algorithm,
    state: SolverState,
    eq: Equilibrium,
) -> float:
    if Algorithm(algorithm) is Algorithm.DPOFA:
        return lyapunov_dpofa(problem, graph, state, eq)
    return lyapunov_ddfa(problem, graph, state, eq)


def lyapunov_trace(
    problem: EmoProblem,
    graph: CommGraph,
    algorithm: Algorithm,
    states: Iterable[SolverState],
    eq: Equilibrium,
) -> List[float]:
    """Lyapunov values along a sequence of states."""
    return [lyapunov(problem, graph, algorithm, s, eq) for s in states]


def count_violations(values: Sequence[float], slack: float = 1e-6) -> int:
    """Number of steps where the sequence rises by more than ``slack``."""
    v = np.asarray(values, dtype=float)
    return int(np.sum(np.diff(v) > slack))


@dataclass
class LyapunovMonitor:
    """Integrator observer recording the Lyapunov value at every step."""

    problem: EmoProblem
    graph: CommGraph
    algorithm: Algorithm
    eq: Equilibrium
    values: List[float] = field(default_factory=list)

    def __call__(self, step: int, state: SolverState, x: np.ndarray) -> None:
        self.values.append(
            lyapunov(self.problem, self.graph, self.algorithm, state, self.eq)
        )

    def violations(self, slack: float = 1e-6) -> int:
        return count_violations(self.values, slack)


@dataclass(frozen=True)
class BoundednessReport:
    """Late-time growth of ``||primal||``, ``||lam||`` and ``||z||``.

    ``reference_*`` are the norms at the sample closest to a tenth of the
    run; ``late_max_*`` are maxima over the samples from there on.
    """

    reference_time: float
    reference_primal: float
    reference_lambda: float
    reference_z: float
    max_primal: float
    max_lambda: float
    max_z: float
    late_max_primal: float
    late_max_lambda: float
    late_max_z: float
    factor: float
    slack: float

    @property
    def bounded(self) -> bool:
        pairs = [
            (self.late_max_primal, self.reference_primal),
            (self.late_max_lambda, self.reference_lambda),
            (self.late_max_z, self.reference_z),
        ]
        finite = all(
            np.isfinite(v) for v in (self.max_primal, self.max_lambda, self.max_z)
        )
        return finite and all(
            late <= self.factor * ref + self.slack for late, ref in pairs
        )


def boundedness_report(
    trajectory: Trajectory, factor: float = 10.0, slack: float = 1e-6
) -> BoundednessReport:
    """Check that no norm grows past ``factor`` times its early value."""
    if not trajectory.samples:
        raise PreconditionError("trajectory has no samples", "trajectory")
    times = trajectory.times
    primal = np.sqrt(np.asarray(trajectory.primal_norms_sq))
    lam = np.sqrt(trajectory.column("lambda_norm_sq"))
    z = np.sqrt(trajectory.column("z_norm_sq"))
    end = trajectory.final_state.t if trajectory.final_state else times[-1]
    ref = int(np.argmin(np.abs(times - end / 10.0)))
    return BoundednessReport(
        reference_time=float(times[ref]),
        reference_primal=float(primal[ref]),
        reference_lambda=float(lam[ref]),
        reference_z=float(z[ref]),
        max_primal=float(primal.max()),
        max_lambda=float(lam.max()),
        max_z=float(z.max()),
        late_max_primal=float(primal[ref:].max()),
        late_max_lambda=float(lam[ref:].max()),
        late_max_z=float(z[ref:].max()),
        factor=factor,
        slack=slack,
    )
