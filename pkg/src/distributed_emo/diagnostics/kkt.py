"""Optimality residuals of a primal point and agent multipliers.

A pair ``(x, lam_bar)`` is optimal iff ``x = P(x - g + W^T lam_bar)`` for
some ``g`` in the subdifferential and ``W x = d0``. Stacked multipliers
must in addition be in consensus.
"""

from typing import Optional

import numpy as np

from ..dynamics.selection import Selection, projected_residual
from ..exceptions import DimensionError
from ..models.reports import KktReport
from ..network.graph import CommGraph, stacked_laplacian
from ..problem.model import EmoProblem


def objective_value(problem: EmoProblem, x: np.ndarray) -> float:
    """``f(x) = sum_i f_i(x_i)``."""
    return problem.stacked.objective.value(_primal(problem, x))


def equality_residual(problem: EmoProblem, x: np.ndarray) -> np.ndarray:
    """``W x - d0``."""
    return problem.stacked.W @ _primal(problem, x) - problem.d0


def lambda_bar_of(problem: EmoProblem, lam: np.ndarray) -> np.ndarray:
    """Mean of the agent multiplier blocks.

    A vector of length ``m`` is taken as ``lam_bar`` itself.
    """
    lam = np.asarray(lam, dtype=float).reshape(-1)
    n, m = problem.n, problem.m
    if lam.shape[0] == m:
        return lam.copy()
    if lam.shape[0] != n * m:
        raise DimensionError(
            f"multipliers have length {lam.shape[0]}, expected {m} or {n * m}",
            expected=n * m,
            actual=lam.shape[0],
        )
    return lam.reshape(n, m).mean(axis=0)


def _primal(problem: EmoProblem, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != problem.total_dim:
        raise DimensionError(
            f"x has length {x.shape[0]}, expected {problem.total_dim}",
            expected=problem.total_dim,
            actual=x.shape[0],
        )
    return x


def kkt_residual(
    problem: EmoProblem,
    x: np.ndarray,
    lam: np.ndarray,
    graph: Optional[CommGraph] = None,
    selection: Selection = "min_norm",
) -> KktReport:
    """Stationarity, feasibility and consensus residuals (infinity norms).

    :param problem: The problem
    :param x: Stacked primal point
    :param lam: Stacked multipliers (length ``n m``) or ``lam_bar``
    :param graph: When given, consensus is ``||L lam||``; otherwise the
        largest deviation of an agent block from the mean
    :param selection: Subgradient selection used in the stationarity test
    :return: The residual report
    """
    x = _primal(problem, x)
    lam = np.asarray(lam, dtype=float).reshape(-1)
    lam_bar = lambda_bar_of(problem, lam)
    form = problem.stacked

    p = projected_residual(
        form.objective, form.Omega, x, form.W.T @ lam_bar, selection
    )
    feasibility = equality_residual(problem, x)
    if lam.shape[0] == problem.m:
        consensus = 0.0
    elif graph is not None:
        consensus = float(
            np.max(np.abs(stacked_laplacian(graph, problem.m) @ lam))
        )
    else:
        blocks = lam.reshape(problem.n, problem.m)
        consensus = float(np.max(np.abs(blocks - lam_bar)))

    return KktReport(
        stationarity=float(np.max(np.abs(p), initial=0.0)),
        feasibility=float(np.max(np.abs(feasibility), initial=0.0)),
        consensus=consensus,
        lambda_bar=[float(v) for v in lam_bar],
    )
