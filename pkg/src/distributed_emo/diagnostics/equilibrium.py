"""Equilibria of the flows built from an optimal primal/multiplier pair."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..dynamics.selection import ddfa_selection
from ..dynamics.state import Algorithm, SolverState
from ..exceptions import ConnectivityError, EquilibriumError
from ..network.graph import (
    CommGraph,
    components,
    is_connected,
    stacked_laplacian,
)
from ..problem.model import EmoProblem

logger = logging.getLogger(__name__)

RANGE_TOLERANCE = 1e-8


@dataclass(frozen=True)
class Equilibrium:
    """Rest point of DPOFA or DDFA.

    :param x_star: Optimal primal point
    :param lambda_star: ``1_n kron lam_bar``
    :param z_star: Minimum-norm solution of ``L z = d - Wbar x*``
    :param y_star: ``x* - g* + Wbar^T lambda*`` (DPOFA only)
    """

    x_star: np.ndarray
    lambda_star: np.ndarray
    z_star: np.ndarray
    y_star: Optional[np.ndarray] = None

    def state(self, algorithm: Algorithm) -> SolverState:
        """The equilibrium as a solver state for ``algorithm``."""
        if Algorithm(algorithm) is Algorithm.DPOFA:
            if self.y_star is None:
                raise EquilibriumError("equilibrium has no y_star")
            primal = self.y_star
        else:
            primal = self.x_star
        return SolverState(primal, self.lambda_star, self.z_star)


def build_equilibrium(
    problem: EmoProblem,
    graph: CommGraph,
    x_star: np.ndarray,
    lambda_bar: np.ndarray,
    algorithm: Algorithm = Algorithm.DDFA,
) -> Equilibrium:
    """Lift an optimal pair to a rest point of the flows.

    The subgradient ``g*`` is the one that makes ``P(x* - g* + W^T lam_bar)
    = x*``, taken inside the subdifferential box.

    :raises ConnectivityError: If the graph is disconnected
    :raises EquilibriumError: If ``d - Wbar x*`` is not in the range of ``L``
    """
    if not is_connected(graph):
        raise ConnectivityError(
            "equilibria need a connected graph", components(graph)
        )
    form = problem.stacked
    x_star = np.asarray(x_star, dtype=float).reshape(-1)
    lambda_bar = np.asarray(lambda_bar, dtype=float).reshape(-1)
    lambda_star = np.kron(np.ones(problem.n), lambda_bar)

    L = stacked_laplacian(graph, problem.m)
    target = form.d - form.Wbar @ x_star
    z_star = np.linalg.lstsq(L, target, rcond=None)[0]
    residual = float(np.max(np.abs(L @ z_star - target), initial=0.0))
    if residual > RANGE_TOLERANCE:
        raise EquilibriumError(
            f"d - Wbar x* is not in the range of L (residual {residual:.3e})",
            residual=residual,
        )

    y_star = None
    if Algorithm(algorithm) is Algorithm.DPOFA:
        v = form.Wbar.T @ lambda_star
        g_star = ddfa_selection(form.objective, x_star, v)
        y_star = x_star - g_star + v

    logger.debug("Built %s equilibrium, range residual %.3e", algorithm, residual)
    return Equilibrium(
        x_star=x_star, lambda_star=lambda_star, z_star=z_star, y_star=y_star
    )
