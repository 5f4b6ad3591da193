"""Fixed-step forward Euler simulation of the DPOFA and DDFA flows.

For DDFA with ``h <= 1`` each step ``x + h p = (1 - h) x + h P(.)`` is a
convex combination of two points of the set, so the iterates stay
feasible; the integrator asserts this at every step.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from ..config.settings import Settings
from ..exceptions import ConnectivityError, IntegrationError, PreconditionError
from ..models.reports import StepChange
from ..network.graph import CommGraph, components, is_connected
from ..problem.model import EmoProblem
from .rhs import Operators, check_state, ddfa_rhs, dpofa_rhs, operators
from .selection import Selection, projected_residual
from .state import Algorithm, SolverState, Trajectory, TrajectorySample

logger = logging.getLogger(__name__)

# Membership slack for DDFA iterates and initial points
STEP_MEMBERSHIP_TOLERANCE = 1e-10
INITIAL_MEMBERSHIP_TOLERANCE = 1e-9

Observer = Callable[[int, SolverState, np.ndarray], None]


@dataclass(frozen=True)
class StopRule:
    """When to stop before ``t_end``.

    The run stops once the stationarity and feasibility residuals
    (infinity norms) both stay below ``tol`` for ``dwell`` consecutive
    steps. Multiplier consensus is reported but does not gate the stop.
    On nonsmooth problems, ``chatter_window`` steps without a new best
    residual halve the step size once.
    """

    tol: float = 1e-6
    dwell: int = 100
    chatter_window: int = 10000

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise PreconditionError("stop tolerance must be positive", "tol")
        if self.dwell < 1 or self.chatter_window < 1:
            raise PreconditionError(
                "dwell and chatter_window must be at least 1", "stop"
            )

    @classmethod
    def from_settings(
        cls, settings: Settings, tol: Optional[float] = None
    ) -> "StopRule":
        """Stop rule from settings, with ``tol`` overriding ``default_tol``."""
        return cls(
            tol=settings.default_tol if tol is None else tol,
            dwell=settings.stop_dwell,
            chatter_window=settings.chatter_window,
        )


def default_initial_state(
    problem: EmoProblem, algorithm: Algorithm
) -> SolverState:
    """``y0 = 0`` for DPOFA, ``x0 = P(0)`` for DDFA, ``lam0 = z0 = 0``."""
    N, nm = problem.total_dim, problem.n * problem.m
    primal = np.zeros(N)
    if Algorithm(algorithm) is Algorithm.DDFA:
        primal = problem.stacked.Omega.project_array(primal)
    return SolverState(primal, np.zeros(nm), np.zeros(nm), 0.0)


def primal_output(
    problem: EmoProblem, algorithm: Algorithm, state: SolverState
) -> np.ndarray:
    """Decision estimate of a state: ``P(y)`` for DPOFA, ``x`` for DDFA."""
    if Algorithm(algorithm) is Algorithm.DPOFA:
        return problem.stacked.Omega.project_array(state.primal)
    return state.primal.copy()


def stop_residuals(
    ops: Operators, x: np.ndarray, lam: np.ndarray
) -> Tuple[float, float]:
    """Per-agent stationarity and feasibility residuals used by the stop rule."""
    p = projected_residual(ops.objective, ops.Omega, x, ops.WbarT @ lam)
    return (
        float(np.max(np.abs(p), initial=0.0)),
        float(np.max(np.abs(ops.W @ x - ops.d0), initial=0.0)),
    )


def _z_mass(z: np.ndarray, n: int, m: int) -> np.ndarray:
    return z.reshape(n, m).sum(axis=0)


def _check_preconditions(
    problem: EmoProblem,
    graph: CommGraph,
    algorithm: Algorithm,
    init: SolverState,
    h: float,
    t_end: float,
    sample_stride: int,
) -> Operators:
    if not (math.isfinite(h) and h > 0):
        raise PreconditionError(f"step size must be positive, got {h}", "h")
    if algorithm is Algorithm.DDFA and h > 1:
        raise PreconditionError(
            f"DDFA needs h <= 1 to keep iterates feasible, got {h}", "h"
        )
    if not (math.isfinite(t_end) and t_end > 0):
        raise PreconditionError(
            f"t_end must be positive, got {t_end}", "t_end"
        )
    if sample_stride < 1:
        raise PreconditionError(
            "sample_stride must be at least 1", "sample_stride"
        )
    if not is_connected(graph):
        raise ConnectivityError(
            "communication graph is not connected", components(graph)
        )
    ops = operators(problem, graph)
    check_state(ops, init)
    for name in ("primal", "lam", "z"):
        if not np.all(np.isfinite(getattr(init, name))):
            raise PreconditionError(
                f"initial {name} is not finite", f"init.{name}"
            )
    if algorithm is Algorithm.DDFA:
        gap = np.max(np.abs(init.primal - ops.Omega.project_array(init.primal)))
        if gap > INITIAL_MEMBERSHIP_TOLERANCE:
            raise PreconditionError(
                f"DDFA needs x0 in the constraint set (distance {gap:.3e})",
                "init.primal",
            )
    return ops


def integrate(
    problem: EmoProblem,
    graph: CommGraph,
    algorithm: Algorithm,
    init: Optional[SolverState] = None,
    h: float = 1e-2,
    t_end: float = 100.0,
    stop: Optional[StopRule] = None,
    sample_stride: int = 1,
    selection: Selection = "min_norm",
    observer: Optional[Observer] = None,
) -> Trajectory:
    """Simulate one algorithm with forward Euler.

    :param problem: Problem to solve
    :param graph: Connected communication graph over the agents
    :param algorithm: DPOFA or DDFA
    :param init: Initial state, defaults to :func:`default_initial_state`
    :param h: Step size
    :param t_end: Simulated horizon
    :param stop: Stop rule, defaults to ``StopRule()``
    :param sample_stride: Record telemetry every this many steps
    :param selection: Subgradient selection
    :param observer: Called as ``observer(step, state, x)`` after every
        accepted step, including step 0
    :return: The sampled trajectory
    :raises PreconditionError: On invalid step, horizon or initial state
    :raises ConnectivityError: If the graph is disconnected
    :raises IntegrationError: If the state becomes non-finite or a DDFA
        iterate leaves the set
    """
    algorithm = Algorithm(algorithm)
    stop = stop or StopRule()
    state = (
        init.copy() if init is not None
        else default_initial_state(problem, algorithm)
    )
    ops = _check_preconditions(
        problem, graph, algorithm, state, h, t_end, sample_stride
    )
    objective = ops.objective
    n, m = ops.n, ops.m

    trajectory = Trajectory(
        algorithm=algorithm, step=h, sample_stride=sample_stride
    )
    z_mass0 = _z_mass(state.z, n, m)
    t0 = state.t
    segment_start_step, segment_start_t = 0, t0
    step_halved = False
    best_residual = math.inf
    stalled_steps = 0
    dwell_count = 0
    k = 0

    logger.info(
        "Integrating %s: n=%d m=%d N=%d h=%g t_end=%g tol=%g",
        algorithm.value,
        n,
        m,
        ops.total_dim,
        h,
        t_end,
        stop.tol,
    )

    while True:
        if algorithm is Algorithm.DPOFA:
            dpofa = dpofa_rhs(problem, graph, state, selection)
            x = dpofa.x
            d_primal, d_lam, d_z = dpofa.dy, dpofa.dlam, dpofa.dz
        else:
            ddfa = ddfa_rhs(problem, graph, state, selection)
            x = state.primal
            d_primal, d_lam, d_z = ddfa.dx, ddfa.dlam, ddfa.dz

        violation = float(
            np.max(np.abs(x - ops.Omega.project_array(x)), initial=0.0)
        )
        trajectory.max_set_violation = max(
            trajectory.max_set_violation, violation
        )
        drift = float(
            np.max(np.abs(_z_mass(state.z, n, m) - z_mass0), initial=0.0)
        )
        trajectory.z_mass_drift = max(trajectory.z_mass_drift, drift)

        if observer is not None:
            observer(k, state, x)
        if k % sample_stride == 0:
            _record(trajectory, ops, state, x)

        residual = max(stop_residuals(ops, x, state.lam))
        dwell_count = dwell_count + 1 if residual <= stop.tol else 0
        if dwell_count >= stop.dwell:
            trajectory.converged = True
            trajectory.stop_reason = "tolerance"
            break
        if state.t >= t_end - 1e-9 * h:
            break

        if not objective.smooth and not step_halved:
            if residual < best_residual:
                best_residual, stalled_steps = residual, 0
            else:
                stalled_steps += 1
            if stalled_steps >= stop.chatter_window:
                new_h = h / 2.0
                trajectory.step_changes.append(
                    StepChange(
                        step_index=k, time=state.t, old_step=h, new_step=new_h
                    )
                )
                logger.warning(
                    "Residual stalled at %.3e for %d steps at t=%.4g; "
                    "halving h from %g to %g",
                    best_residual,
                    stalled_steps,
                    state.t,
                    h,
                    new_h,
                )
                h, step_halved = new_h, True
                segment_start_step, segment_start_t = k, state.t

        k += 1
        state = SolverState(
            state.primal + h * d_primal,
            state.lam + h * d_lam,
            state.z + h * d_z,
            # Times are computed, not accumulated
            segment_start_t + (k - segment_start_step) * h,
        )
        for name in ("primal", "lam", "z"):
            if not np.all(np.isfinite(getattr(state, name))):
                raise IntegrationError(
                    f"non-finite {name} at step {k} (t={state.t:.6g})",
                    step=k,
                    component=name,
                )
        if algorithm is Algorithm.DDFA:
            gap = float(
                np.max(
                    np.abs(state.primal - ops.Omega.project_array(state.primal)),
                    initial=0.0,
                )
            )
            if gap > STEP_MEMBERSHIP_TOLERANCE:
                raise IntegrationError(
                    f"DDFA iterate left the constraint set by {gap:.3e} "
                    f"at step {k}",
                    step=k,
                    component="primal",
                )

    trajectory.steps = k
    trajectory.final_state = state
    trajectory.final_x = x.copy()
    logger.info(
        "Stopped %s at t=%.6g after %d steps (%s), residual %.3e",
        algorithm.value,
        state.t,
        k,
        trajectory.stop_reason,
        residual,
    )
    return trajectory


def _record(
    trajectory: Trajectory, ops: Operators, state: SolverState, x: np.ndarray
) -> None:
    eq = ops.W @ x - ops.d0
    trajectory.samples.append(
        TrajectorySample(
            t=state.t,
            x=x.copy(),
            f_value=ops.objective.value(x),
            eq_residual_sq=float(eq @ eq),
            lambda_norm_sq=float(state.lam @ state.lam),
            z_norm_sq=float(state.z @ state.z),
        )
    )
    trajectory.primal_norms_sq.append(float(state.primal @ state.primal))
