"""Turn an :class:`ExperimentConfig` into a problem, graph and initial state."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..config.experiment import ExperimentConfig, GraphSpec, ProblemSpec
from ..dynamics.integrator import default_initial_state
from ..dynamics.state import Algorithm, SolverState
from ..exceptions import ConfigurationError, DimensionError, ValidationError
from ..network.graph import CommGraph
from ..problem.model import AgentProblem, EmoProblem, split_supply
from .builtins import NETFLOW_ARCS, load_builtin

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResolvedExperiment:
    """Everything a run needs besides integration parameters."""

    name: str
    problem: EmoProblem
    graph: CommGraph


def build_inline_problem(spec: ProblemSpec) -> EmoProblem:
    """Build an inline problem definition.

    :raises ConfigurationError: If the data do not form a valid problem
    """
    assert spec.agents is not None and spec.m is not None
    try:
        supplies = split_supply(spec.d0, len(spec.agents), spec.supply_weights)
        agents = []
        for index, agent in enumerate(spec.agents):
            constraint_set = agent.set.build()
            w_block = np.asarray(agent.w, dtype=float)
            if w_block.shape != (spec.m, constraint_set.dim):
                raise DimensionError(
                    f"agent {index}: w has shape {w_block.shape}, expected "
                    f"({spec.m}, {constraint_set.dim})",
                    agent_index=index,
                    expected=(spec.m, constraint_set.dim),
                    actual=w_block.shape,
                )
            agents.append(
                AgentProblem(
                    objective=agent.objective.build(constraint_set.dim),
                    constraint_set=constraint_set,
                    w_block=w_block,
                    supply=supplies[index],
                )
            )
        return EmoProblem(agents=tuple(agents), m=spec.m, d0=np.asarray(spec.d0))
    except ValidationError as exc:
        raise ConfigurationError(
            f"invalid problem definition: {exc.message}", setting="problem"
        ) from exc
    except ValueError as exc:
        # Coefficient lists that do not broadcast to the set dimension
        raise ConfigurationError(
            f"invalid problem definition: {exc}", setting="problem"
        ) from exc


def build_graph(spec: GraphSpec, n: int, builtin: Optional[str]) -> CommGraph:
    """Build the communication graph over ``n`` agents."""
    try:
        if spec.edges is not None:
            return CommGraph.from_edges(
                n, [(int(e[0]), int(e[1]), *e[2:]) for e in spec.edges]
            )
        if spec.builtin == "line_graph":
            if builtin != "netflow6x12":
                raise ConfigurationError(
                    "the line_graph topology needs the netflow6x12 problem",
                    setting="graph.builtin",
                )
            return CommGraph.line_graph_of(NETFLOW_ARCS, 6)
        return {
            "ring": CommGraph.ring,
            "complete": CommGraph.complete,
            "path": CommGraph.path,
        }[spec.builtin](n)
    except ValidationError as exc:
        raise ConfigurationError(
            f"invalid graph: {exc.message}", setting="graph"
        ) from exc


def resolve_experiment(config: ExperimentConfig) -> ResolvedExperiment:
    """Resolve the problem and graph of an experiment.

    Built-in problems come with their default graph, which an explicit
    ``graph`` section replaces; inline problems default to a ring.
    """
    builtin = config.problem.builtin
    if builtin is not None:
        problem, graph = load_builtin(builtin, config.seed)
    else:
        problem = build_inline_problem(config.problem)
        graph = CommGraph.ring(problem.n)
    if config.graph is not None:
        graph = build_graph(config.graph, problem.n, builtin)
    if graph.n != problem.n:
        raise ConfigurationError(
            f"graph has {graph.n} nodes, problem has {problem.n} agents",
            setting="graph",
        )
    logger.info(
        "Resolved experiment '%s': n=%d m=%d N=%d, %d edges",
        config.name,
        problem.n,
        problem.m,
        problem.total_dim,
        graph.edge_count,
    )
    return ResolvedExperiment(name=config.name, problem=problem, graph=graph)


def initial_state(
    config: ExperimentConfig, problem: EmoProblem, algorithm: Algorithm
) -> SolverState:
    """Default initial state with the config's ``init`` blocks applied."""
    state = default_initial_state(problem, algorithm)
    init = config.init
    for name, values in (
        ("primal", init.primal),
        ("lam", init.lam),
        ("z", init.z),
    ):
        if values is None:
            continue
        current = getattr(state, name)
        array = np.asarray(values, dtype=float)
        if array.shape != current.shape:
            raise ConfigurationError(
                f"init.{name} has length {array.size}, expected "
                f"{current.size}",
                setting=f"init.{name}",
            )
        setattr(state, name, array)
    return state
