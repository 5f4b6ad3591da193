"""Right-hand sides of the projected output feedback (DPOFA) and derivative
feedback (DDFA) flows.

Both evaluate every agent at once against one snapshot of the state, which
is the synchronous update the agents would perform in parallel. Agent
``i`` only reads its own blocks and, through the Laplacian, its
neighbors' ``lam`` and ``z`` blocks.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..exceptions import DimensionError, IntegrationError
from ..network.graph import CommGraph, stacked_laplacian
from ..problem.model import EmoProblem
from ..problem.objectives import ObjectiveOracle
from ..problem.sets import Product
from .selection import Selection, ddfa_selection, dpofa_selection
from .state import SolverState

# Largest distance of a DDFA state from its set before the step is rejected
MEMBERSHIP_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Operators:
    """Stacked matrices of one problem on one graph."""

    W: np.ndarray
    Wbar: np.ndarray
    WbarT: np.ndarray
    L: np.ndarray
    d: np.ndarray
    d0: np.ndarray
    Omega: Product
    objective: ObjectiveOracle
    n: int
    m: int
    total_dim: int


@lru_cache(maxsize=32)
def operators(problem: EmoProblem, graph: CommGraph) -> Operators:
    """Build (and cache) the operators for ``problem`` on ``graph``."""
    if graph.n != problem.n:
        raise DimensionError(
            f"graph has {graph.n} nodes, problem has {problem.n} agents",
            expected=problem.n,
            actual=graph.n,
        )
    form = problem.stacked
    WbarT = np.ascontiguousarray(form.Wbar.T)
    WbarT.setflags(write=False)
    return Operators(
        W=form.W,
        Wbar=form.Wbar,
        WbarT=WbarT,
        L=stacked_laplacian(graph, problem.m),
        d=form.d,
        d0=problem.d0,
        Omega=form.Omega,
        objective=form.objective,
        n=problem.n,
        m=problem.m,
        total_dim=form.total_dim,
    )


def check_state(ops: Operators, state: SolverState) -> None:
    """Raise :class:`DimensionError` unless the state fits the operators."""
    expected = {
        "primal": ops.total_dim,
        "lam": ops.n * ops.m,
        "z": ops.n * ops.m,
    }
    for name, size in expected.items():
        actual = getattr(state, name).shape[0]
        if actual != size:
            raise DimensionError(
                f"state.{name} has length {actual}, expected {size}",
                expected=size,
                actual=actual,
            )


@dataclass(frozen=True)
class DpofaDerivative:
    """Time derivatives of DPOFA and its output ``x = P(y)``."""

    dy: np.ndarray
    dlam: np.ndarray
    dz: np.ndarray
    x: np.ndarray


@dataclass(frozen=True)
class DdfaDerivative:
    """Time derivatives of DDFA; ``dx`` is the projected direction ``p``."""

    dx: np.ndarray
    dlam: np.ndarray
    dz: np.ndarray


def dpofa_rhs(
    problem: EmoProblem,
    graph: CommGraph,
    state: SolverState,
    selection: Selection = "min_norm",
) -> DpofaDerivative:
    """Evaluate the projected output feedback flow.

    ``x = P(y)``, ``dy = -y + x - g(x) + Wbar^T lam``,
    ``dlam = d - Wbar x - L lam - L z``, ``dz = L lam``.
    """
    ops = operators(problem, graph)
    check_state(ops, state)
    y, lam, z = state.primal, state.lam, state.z
    x = ops.Omega.project_array(y)
    v = ops.WbarT @ lam
    g = dpofa_selection(ops.objective, x, y, v, selection)
    L_lam = ops.L @ lam
    return DpofaDerivative(
        dy=-y + x - g + v,
        dlam=ops.d - ops.Wbar @ x - L_lam - ops.L @ z,
        dz=L_lam,
        x=x,
    )


def ddfa_rhs(
    problem: EmoProblem,
    graph: CommGraph,
    state: SolverState,
    selection: Selection = "min_norm",
) -> DdfaDerivative:
    """Evaluate the derivative feedback flow.

    ``p = P(x - g(x) + Wbar^T lam) - x``, ``dx = p``,
    ``dlam = d - Wbar x - L lam - L z - Wbar p``, ``dz = L lam``. The
    derivative term enters through ``p``, never by differencing states.

    :raises IntegrationError: If ``x`` is farther than 1e-9 from the set
    """
    ops = operators(problem, graph)
    check_state(ops, state)
    x, lam, z = state.primal, state.lam, state.z
    violation = float(
        np.max(np.abs(x - ops.Omega.project_array(x)), initial=0.0)
    )
    if violation > MEMBERSHIP_TOLERANCE:
        raise IntegrationError(
            f"DDFA state left the constraint set by {violation:.3e}",
            component="primal",
        )
    v = ops.WbarT @ lam
    g = ddfa_selection(ops.objective, x, v, selection)
    p = ops.Omega.project_array(x - g + v) - x
    L_lam = ops.L @ lam
    return DdfaDerivative(
        dx=p,
        dlam=ops.d - ops.Wbar @ (x + p) - L_lam - ops.L @ z,
        dz=L_lam,
    )
