"""EMO problem data model and its stacked representation.

An :class:`EmoProblem` is the list of agents plus the shared constraint
dimension ``m`` and total supply ``d0``. :func:`stack` builds the compact
operators both algorithms run on: the horizontal concatenation ``W``, the
block-diagonal ``Wbar`` and the product set ``Omega``.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import block_diag
from scipy.optimize import linprog

from ..exceptions import ConnectivityError, DimensionError, ValidationError
from ..models.reports import AssumptionCheck, ValidationReport
from ..network.graph import (
    CommGraph,
    algebraic_connectivity,
    components,
    is_connected,
)
from .objectives import ObjectiveOracle, probe_convexity, stack_objectives
from .sets import ConvexSet, Product

logger = logging.getLogger(__name__)

SUPPLY_TOLERANCE = 1e-9
WEIGHT_TOLERANCE = 1e-12
# Half-width of the probe box along unbounded directions
PROBE_RADIUS = 10.0


@dataclass(frozen=True, eq=False)
class AgentProblem:
    """Private data of one agent.

    :param objective: Objective oracle ``f_i``
    :param constraint_set: Constraint set ``Omega_i``
    :param w_block: Constraint block ``W_i`` of shape ``(m, q_i)``
    :param supply: Supply share ``d_i`` of length ``m``
    """

    objective: ObjectiveOracle
    constraint_set: ConvexSet
    w_block: np.ndarray
    supply: np.ndarray

    def __post_init__(self) -> None:
        w_block = np.array(self.w_block, dtype=float)
        if w_block.ndim == 1:
            w_block = w_block.reshape(-1, 1)
        supply = np.array(self.supply, dtype=float).reshape(-1)
        w_block.setflags(write=False)
        supply.setflags(write=False)
        object.__setattr__(self, "w_block", w_block)
        object.__setattr__(self, "supply", supply)

    @property
    def dim(self) -> int:
        return self.constraint_set.dim


def _check_agent(index: int, agent: AgentProblem, m: int) -> None:
    q = agent.constraint_set.dim
    if agent.objective.dim != q:
        raise DimensionError(
            f"agent {index}: objective dimension {agent.objective.dim} "
            f"does not match set dimension {q}",
            agent_index=index,
            expected=q,
            actual=agent.objective.dim,
        )
    if agent.w_block.ndim != 2 or agent.w_block.shape != (m, q):
        raise DimensionError(
            f"agent {index}: w_block has shape {agent.w_block.shape}, "
            f"expected {(m, q)}",
            agent_index=index,
            expected=(m, q),
            actual=agent.w_block.shape,
        )
    if agent.supply.shape != (m,):
        raise DimensionError(
            f"agent {index}: supply has length {agent.supply.shape[0]}, "
            f"expected {m}",
            agent_index=index,
            expected=m,
            actual=agent.supply.shape[0],
        )


@dataclass(frozen=True)
class StackedForm:
    """Compact operators of an EMO problem.

    :param W: Horizontal concatenation ``[W_1 ... W_n]``, shape ``(m, N)``
    :param Wbar: Block diagonal of the ``W_i``, shape ``(n m, N)``
    :param Omega: Product of the agent sets in order
    :param total_dim: ``N = sum q_i``
    :param d: Stacked supplies ``[d_1; ...; d_n]``
    :param objective: Stacked objective on the full primal vector
    """

    W: np.ndarray
    Wbar: np.ndarray
    Omega: Product
    total_dim: int
    d: np.ndarray
    objective: ObjectiveOracle


@dataclass(frozen=True, eq=False)
class EmoProblem:
    """Extended monotropic problem.

    minimize ``sum_i f_i(x_i)`` subject to ``sum_i W_i x_i = d0`` and
    ``x_i in Omega_i``.
    """

    agents: Tuple[AgentProblem, ...]
    m: int
    d0: np.ndarray

    def __post_init__(self) -> None:
        agents = tuple(self.agents)
        if not agents:
            raise ValidationError("problem needs at least one agent", "agents")
        if self.m < 1:
            raise ValidationError("m must be positive", field="m", value=self.m)
        d0 = np.array(self.d0, dtype=float).reshape(-1)
        if d0.shape != (self.m,):
            raise DimensionError(
                f"d0 has length {d0.shape[0]}, expected {self.m}",
                expected=self.m,
                actual=d0.shape[0],
            )
        for index, agent in enumerate(agents):
            _check_agent(index, agent, self.m)
        total = np.sum([a.supply for a in agents], axis=0)
        gap = float(np.max(np.abs(total - d0)))
        if gap > SUPPLY_TOLERANCE * (1.0 + float(np.max(np.abs(d0)))):
            raise ValidationError(
                f"agent supplies sum to {total.tolist()}, not d0 "
                f"{d0.tolist()}",
                field="supply",
                value=gap,
            )
        d0.setflags(write=False)
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "d0", d0)

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(a.dim for a in self.agents)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    @cached_property
    def slices(self) -> List[slice]:
        """Slice of each agent inside the stacked primal vector."""
        offsets = np.cumsum((0,) + self.dims)
        return [slice(int(s), int(e)) for s, e in zip(offsets[:-1], offsets[1:])]

    @property
    def strictly_convex(self) -> bool:
        return all(a.objective.strictly_convex for a in self.agents)

    @property
    def smooth(self) -> bool:
        return all(a.objective.smooth for a in self.agents)

    @cached_property
    def stacked(self) -> StackedForm:
        """Cached result of :func:`stack`."""
        return stack(self)


def stack(problem: EmoProblem) -> StackedForm:
    """Build the compact operators of ``problem``.

    :raises DimensionError: naming the first inconsistent agent
    """
    for index, agent in enumerate(problem.agents):
        _check_agent(index, agent, problem.m)
    blocks = [a.w_block for a in problem.agents]
    W = np.hstack(blocks)
    Wbar = block_diag(*blocks)
    d = np.concatenate([a.supply for a in problem.agents])
    for array in (W, Wbar, d):
        array.setflags(write=False)
    return StackedForm(
        W=W,
        Wbar=Wbar,
        Omega=Product(tuple(a.constraint_set for a in problem.agents)),
        total_dim=problem.total_dim,
        d=d,
        objective=stack_objectives([a.objective for a in problem.agents]),
    )


def split_supply(
    d0: Sequence[float] | np.ndarray,
    n: int,
    weights: Optional[Sequence[float] | np.ndarray] = None,
) -> List[np.ndarray]:
    """Split ``d0`` into ``n`` shares that sum to ``d0``.

    The rounding residual goes to the last agent, so the sum is exact up
    to one floating-point subtraction.

    :param d0: Total supply
    :param n: Number of agents
    :param weights: Optional share of each agent, summing to one
    :return: List of supply vectors
    :raises ValidationError: On a bad agent count or weights
    """
    if n < 1:
        raise ValidationError("n must be at least 1", field="n", value=n)
    total = np.asarray(d0, dtype=float).reshape(-1)
    if weights is None:
        w = np.full(n, 1.0 / n)
    else:
        w = np.asarray(weights, dtype=float).reshape(-1)
        if w.shape != (n,):
            raise DimensionError(
                f"weights have length {w.shape[0]}, expected {n}",
                expected=n,
                actual=w.shape[0],
            )
        if abs(float(np.sum(w)) - 1.0) > WEIGHT_TOLERANCE:
            raise ValidationError(
                "supply weights must sum to 1",
                field="weights",
                value=float(np.sum(w)),
            )
    shares = [w[i] * total for i in range(n - 1)]
    shares.append(total - np.sum(shares, axis=0) if shares else total.copy())
    return shares


def _probe_box(constraint_set: ConvexSet) -> Tuple[np.ndarray, np.ndarray]:
    lo, hi = constraint_set.bounds()
    lo = np.where(np.isfinite(lo), lo, -PROBE_RADIUS)
    hi = np.where(np.isfinite(hi), hi, PROBE_RADIUS)
    return lo, np.maximum(hi, lo)


def slater_margin(problem: EmoProblem) -> Optional[float]:
    """Largest ``t`` with a feasible ``x`` at distance ``t`` from the box faces.

    Solved as a linear program; only defined for componentwise sets. The
    margin is capped at 1, and ``None`` means the check does not apply.
    Returns ``-inf`` when no feasible point exists.
    """
    form = problem.stacked
    if not form.Omega.componentwise:
        return None
    lo, hi = form.Omega.bounds()
    N = form.total_dim
    rows, rhs = [], []
    for k in range(N):
        if np.isfinite(lo[k]):
            row = np.zeros(N + 1)
            row[k], row[N] = -1.0, 1.0
            rows.append(row)
            rhs.append(-lo[k])
        if np.isfinite(hi[k]):
            row = np.zeros(N + 1)
            row[k], row[N] = 1.0, 1.0
            rows.append(row)
            rhs.append(hi[k])
    cost = np.zeros(N + 1)
    cost[N] = -1.0
    result = linprog(
        cost,
        A_ub=np.array(rows) if rows else None,
        b_ub=np.array(rhs) if rows else None,
        A_eq=np.hstack([form.W, np.zeros((problem.m, 1))]),
        b_eq=problem.d0,
        bounds=[(None, None)] * N + [(None, 1.0)],
        method="highs",
    )
    if result.status == 2:
        return float("-inf")
    if not result.success:
        logger.debug("Slater program failed: %s", result.message)
        return None
    return float(result.x[N])


def validate(
    problem: EmoProblem,
    graph: CommGraph,
    strict: bool = True,
    samples: int = 1000,
    rng: Optional[np.random.Generator] = None,
) -> ValidationReport:
    """Check the standing assumptions of the solvers.

    Connectivity is decided exactly. Convexity and strict monotonicity are
    probed by sampling, and the interior-point condition is checked by a
    linear program on componentwise sets.

    :param problem: Problem to check
    :param graph: Communication graph
    :param strict: Raise on a disconnected graph instead of reporting it
    :param samples: Pairs sampled per agent by the convexity probe
    :param rng: Generator for the probes
    :return: Validation report, one entry per assumption
    :raises DimensionError: If the graph size differs from the agent count
    :raises ConnectivityError: If ``strict`` and the graph is disconnected
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    if graph.n != problem.n:
        raise DimensionError(
            f"graph has {graph.n} nodes, problem has {problem.n} agents",
            expected=problem.n,
            actual=graph.n,
        )
    checks: List[AssumptionCheck] = [
        AssumptionCheck(
            name="dimensions",
            passed=True,
            reason=f"{problem.n} agents, m={problem.m}, N={problem.total_dim}",
        )
    ]

    connected = is_connected(graph)
    if not connected and strict:
        raise ConnectivityError(
            "communication graph is not connected", components(graph)
        )
    checks.append(
        AssumptionCheck(
            name="connectivity",
            passed=connected,
            reason=(
                f"algebraic connectivity {algebraic_connectivity(graph):.3e}"
                if connected
                else f"{len(components(graph))} components"
            ),
        )
    )

    convex_failures, strict_failures = [], []
    for index, agent in enumerate(problem.agents):
        lo, hi = _probe_box(agent.constraint_set)
        probe = probe_convexity(agent.objective, lo, hi, samples, rng)
        if not probe.convex:
            convex_failures.append(index)
        if agent.objective.strictly_convex and not probe.strictly_monotone:
            strict_failures.append(index)
    checks.append(
        AssumptionCheck(
            name="convexity",
            passed=not convex_failures,
            reason=(
                f"{samples} sampled pairs per agent"
                if not convex_failures
                else f"subgradient inequality violated for agents "
                f"{convex_failures}"
            ),
        )
    )

    declared = problem.strictly_convex
    if strict_failures:
        strict_reason = f"monotonicity probe failed for agents {strict_failures}"
    elif declared:
        strict_reason = "declared strictly convex"
    elif problem.smooth:
        strict_reason = "not strictly convex; smooth convex relaxation applies"
    else:
        strict_reason = "neither strictly convex nor smooth"
    checks.append(
        AssumptionCheck(
            name="strict_convexity",
            passed=not strict_failures and (declared or problem.smooth),
            reason=strict_reason,
        )
    )

    margin = slater_margin(problem)
    if margin is None:
        slater = AssumptionCheck(
            name="slater", passed=None, reason="not checked for curved sets"
        )
    else:
        slater = AssumptionCheck(
            name="slater",
            passed=margin > 1e-9,
            reason=(
                "no feasible point"
                if np.isinf(margin)
                else f"interior margin {margin:.3e}"
            ),
        )
    checks.append(slater)

    convex_values = [
        a.dim == 1
        or (a.constraint_set.componentwise and a.objective.box_subdifferential)
        for a in problem.agents
    ]
    checks.append(
        AssumptionCheck(
            name="convex_values",
            passed=all(convex_values),
            reason=(
                "scalar agents or box sets with box subdifferentials"
                if all(convex_values)
                else "agents "
                f"{[i for i, ok in enumerate(convex_values) if not ok]} "
                "may have non-convex right-hand sides"
            ),
        )
    )

    report = ValidationReport(checks=checks)
    logger.info(
        "Validated problem with %d agents: %s",
        problem.n,
        ", ".join(f"{c.name}={c.passed}" for c in checks),
    )
    return report
