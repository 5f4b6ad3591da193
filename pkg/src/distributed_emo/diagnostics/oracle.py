"""Centralized reference solver used to build ground truth for tests.

Two phases:

1. A projected primal-dual (Arrow-Hurwicz) subgradient iteration with
   diminishing steps gives a warm start for the multiplier.
2. A dual root finder drives ``F(lam) = W x(lam) - d0`` to zero, where
   ``x(lam)`` stacks the exact agent best responses to ``W_i^T lam``.
   Damped Newton steps use a finite-difference Jacobian solved by least
   squares; when they stall, dual ascent steps take over.

The returned multiplier has no component along ``ker W^T``.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import null_space

from ..exceptions import OracleConvergenceError, PreconditionError
from ..models.reports import KktReport
from ..problem.model import EmoProblem
from ..problem.objectives import SeparableQuadraticL1
from .kkt import kkt_residual

logger = logging.getLogger(__name__)

ORACLE_VERSION = 1
WARM_START_FRACTION = 4
WARM_START_CAP = 500
BACKTRACK_STEPS = 30
FD_STEP = 1e-7
ASCENT_SCAN = 15


@dataclass(frozen=True)
class OracleSolution:
    """Result of :func:`solve_centralized`.

    :param x_star: Optimal primal point
    :param lambda_bar: Optimal multiplier with no ``ker W^T`` component
    :param kkt: KKT residuals of the pair
    :param iterations: Iterations spent over both phases
    """

    x_star: np.ndarray
    lambda_bar: np.ndarray
    kkt: KktReport
    iterations: int


class _BestResponse:
    """Stacked best response ``x(lam)`` of all agents."""

    def __init__(self, problem: EmoProblem):
        self.problem = problem
        form = problem.stacked
        self.W = form.W
        self.vectorized = (
            isinstance(form.objective, SeparableQuadraticL1)
            and form.Omega.componentwise
        )

    def __call__(self, lam_bar: np.ndarray) -> np.ndarray:
        form = self.problem.stacked
        if self.vectorized:
            return form.objective.best_response(self.W.T @ lam_bar, form.Omega)
        return np.concatenate(
            [
                agent.objective.best_response(
                    agent.w_block.T @ lam_bar, agent.constraint_set
                )
                for agent in self.problem.agents
            ]
        )


def _residual(
    problem: EmoProblem, best: _BestResponse, lam_bar: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    x = best(lam_bar)
    return x, problem.stacked.W @ x - problem.d0


def _warm_start(
    problem: EmoProblem, iterations: int
) -> Tuple[np.ndarray, np.ndarray]:
    form = problem.stacked
    W, Omega, objective = form.W, form.Omega, form.objective
    step0 = 0.5 / max(1.0, float(np.linalg.norm(W, 2)))
    x = Omega.project_array(np.zeros(form.total_dim))
    lam = np.zeros(problem.m)
    for k in range(iterations):
        a = step0 / np.sqrt(k + 1.0)
        direction = objective.subgradient(x) - W.T @ lam
        x_next = Omega.project_array(x - a * direction)
        lam = lam + a * (problem.d0 - W @ x)
        x = x_next
    return x, lam


def _jacobian(
    problem: EmoProblem,
    best: _BestResponse,
    lam_bar: np.ndarray,
    F: np.ndarray,
) -> np.ndarray:
    J = np.empty((problem.m, problem.m))
    for j in range(problem.m):
        eps = FD_STEP * max(1.0, abs(lam_bar[j]))
        shifted = lam_bar.copy()
        shifted[j] += eps
        J[:, j] = (_residual(problem, best, shifted)[1] - F) / eps
    return J


def _drop_kernel(W: np.ndarray, lam_bar: np.ndarray) -> np.ndarray:
    kernel = null_space(W.T)
    if kernel.size == 0:
        return lam_bar
    return lam_bar - kernel @ (kernel.T @ lam_bar)


def solve_centralized(
    problem: EmoProblem,
    tol: float = 1e-10,
    max_iter: int = 2000,
    lambda0: Optional[np.ndarray] = None,
) -> OracleSolution:
    """Solve the problem centrally to KKT residual ``tol``.

    :param problem: Strictly convex (or smooth convex) problem
    :param tol: Target for the largest KKT residual
    :param max_iter: Iteration cap over both phases
    :param lambda0: Optional multiplier to start the root finder from,
        skipping the warm start
    :raises OracleConvergenceError: If ``tol`` is not reached
    """
    if tol <= 0 or max_iter < 1:
        raise PreconditionError("tol and max_iter must be positive", "tol")
    best = _BestResponse(problem)
    W = problem.stacked.W

    if lambda0 is None:
        warm = min(max_iter // WARM_START_FRACTION, WARM_START_CAP)
        _, lam_bar = _warm_start(problem, warm)
        logger.debug("Oracle warm start after %d steps: %s", warm, lam_bar)
    else:
        warm = 0
        lam_bar = np.asarray(lambda0, dtype=float).reshape(-1).copy()

    x, F = _residual(problem, best, lam_bar)
    best_x, best_lam, best_norm = x, lam_bar, float(np.linalg.norm(F))
    iterations = warm
    report = kkt_residual(problem, x, lam_bar)

    while iterations < max_iter and report.max_residual > tol:
        iterations += 1
        norm = float(np.linalg.norm(F))
        J = _jacobian(problem, best, lam_bar, F)
        step = np.linalg.lstsq(J, -F, rcond=None)[0]

        candidate, x_c, F_c = lam_bar, x, F
        t = 1.0
        for _ in range(BACKTRACK_STEPS):
            trial = lam_bar + t * step
            x_t, F_t = _residual(problem, best, trial)
            if np.linalg.norm(F_t) < norm:
                candidate, x_c, F_c = trial, x_t, F_t
                break
            t *= 0.5

        if candidate is lam_bar:
            # Dual ascent along -F, the gradient of the concave dual;
            # scan step lengths around 1/||J|| and keep the best
            scale = float(np.linalg.norm(J, 2))
            base = 1.0 / scale if scale > 1e-12 else 1.0
            best_trial = norm
            for j in range(-ASCENT_SCAN, ASCENT_SCAN):
                trial = lam_bar - base * 2.0**j * F
                x_t, F_t = _residual(problem, best, trial)
                trial_norm = float(np.linalg.norm(F_t))
                if trial_norm < best_trial:
                    candidate, x_c, F_c = trial, x_t, F_t
                    best_trial = trial_norm

        if candidate is lam_bar:
            logger.debug("Oracle stalled at |F|=%.3e", norm)
            break

        lam_bar, x, F = candidate, x_c, F_c
        report = kkt_residual(problem, x, lam_bar)
        if float(np.linalg.norm(F)) < best_norm:
            best_x, best_lam, best_norm = x, lam_bar, float(np.linalg.norm(F))

    lam_bar = _drop_kernel(W, best_lam)
    report = kkt_residual(problem, best_x, lam_bar)
    if report.max_residual > tol:
        raise OracleConvergenceError(
            f"centralized oracle reached KKT residual "
            f"{report.max_residual:.3e} > {tol:.1e} after {iterations} "
            "iterations",
            best_residual=report.max_residual,
            iterations=iterations,
        )
    logger.info(
        "Oracle converged in %d iterations, KKT residual %.3e",
        iterations,
        report.max_residual,
    )
    return OracleSolution(
        x_star=best_x, lambda_bar=lam_bar, kkt=report, iterations=iterations
    )


def centralized_oracle(
    problem: EmoProblem, tol: float = 1e-10, max_iter: int = 2000
) -> Tuple[np.ndarray, np.ndarray]:
    """``(x_star, lambda_bar)`` from :func:`solve_centralized`."""
    solution = solve_centralized(problem, tol=tol, max_iter=max_iter)
    return solution.x_star, solution.lambda_bar
