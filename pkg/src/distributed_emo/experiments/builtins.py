"""Built-in experiment instances.

- ``nonsmooth10``: ten scalar agents minimizing ``x^2 + |x|`` on
  ``[-1, 1]`` under a two-row coupling constraint, on a unit ring.
- ``netflow6x12``: single-commodity flow on a committed 6-node/12-arc
  digraph with costs ``x^2`` and capacities ``[0, 10]``; agents are arcs
  and talk when their arcs share a node.
- ``minnorm``: least-norm solution of a seeded underdetermined system
  ``W x = d0`` split over four agents on a ring.

Incidence columns carry ``+1`` at the tail of an arc and ``-1`` at its
head, so ``A x = b`` reads "flow out minus flow in equals supply".
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import ConfigurationError, DimensionError, InfeasibleProblemError
from ..network.graph import CommGraph, laplacian
from ..problem.model import AgentProblem, EmoProblem, split_supply
from ..problem.objectives import ObjectiveOracle, SeparableQuadraticL1
from ..problem.sets import Box, ConvexSet, FullSpace, Interval

NONSMOOTH10_MATRIX = np.array(
    [
        [1, 1, 1, 0, 0, 1, 1, 1, 0, 0],
        [1, 0, 0, 1, 1, 1, 0, 0, 1, 1],
    ],
    dtype=float,
)
NONSMOOTH10_D0 = (3.0, 2.0)

# 0-based (tail, head) arcs of the committed flow network
NETFLOW_ARCS: Tuple[Tuple[int, int], ...] = (
    (0, 1),
    (0, 2),
    (0, 3),
    (4, 1),
    (4, 2),
    (4, 3),
    (5, 1),
    (5, 2),
    (5, 3),
    (4, 0),
    (4, 5),
    (2, 1),
)
NETFLOW_SUPPLIES = (6.0, -7.2, -4.8, -9.6, 8.4, 7.2)
SUPPLY_BALANCE_TOLERANCE = 1e-9


def from_matrix(
    W: np.ndarray,
    d0: Sequence[float],
    objectives: Sequence[ObjectiveOracle],
    sets: Sequence[ConvexSet],
    weights: Optional[Sequence[float]] = None,
) -> EmoProblem:
    """Split the columns of ``W`` among agents by their set dimensions."""
    W = np.asarray(W, dtype=float)
    if len(objectives) != len(sets):
        raise DimensionError(
            "need one objective per set",
            expected=len(sets),
            actual=len(objectives),
        )
    supplies = split_supply(d0, len(sets), weights)
    offsets = np.cumsum([0] + [s.dim for s in sets])
    if offsets[-1] != W.shape[1]:
        raise DimensionError(
            f"sets cover {offsets[-1]} columns, W has {W.shape[1]}",
            expected=W.shape[1],
            actual=int(offsets[-1]),
        )
    agents = [
        AgentProblem(
            objective=objectives[i],
            constraint_set=sets[i],
            w_block=W[:, offsets[i] : offsets[i + 1]],
            supply=supplies[i],
        )
        for i in range(len(sets))
    ]
    return EmoProblem(agents=tuple(agents), m=W.shape[0], d0=np.asarray(d0))


def builtin_nonsmooth10() -> Tuple[EmoProblem, CommGraph]:
    """Ten scalar agents, ``f_i = x_i^2 + |x_i|``, ``|x_i| <= 1``."""
    n = NONSMOOTH10_MATRIX.shape[1]
    problem = from_matrix(
        NONSMOOTH10_MATRIX,
        NONSMOOTH10_D0,
        [SeparableQuadraticL1.uniform(1, a=1.0, b=1.0) for _ in range(n)],
        [Interval(-1.0, 1.0) for _ in range(n)],
    )
    return problem, CommGraph.ring(n)


@dataclass(frozen=True)
class NetworkSpec:
    """Directed flow network.

    :param n_nodes: Number of nodes
    :param arcs: ``(tail, head)`` pairs, 0-based
    :param supplies: Node supplies, shape ``(n_nodes,)`` or
        ``(n_nodes, commodities)``
    :param capacity: Flow bounds ``(lo, hi)`` applied to every commodity
    """

    n_nodes: int
    arcs: Tuple[Tuple[int, int], ...]
    supplies: np.ndarray
    capacity: Tuple[float, float] = (0.0, 10.0)
    name: str = field(default="custom")

    @property
    def supply_matrix(self) -> np.ndarray:
        b = np.asarray(self.supplies, dtype=float)
        return b.reshape(self.n_nodes, -1)

    @property
    def commodities(self) -> int:
        return int(self.supply_matrix.shape[1])


def default_network_spec() -> NetworkSpec:
    return NetworkSpec(
        n_nodes=6,
        arcs=NETFLOW_ARCS,
        supplies=np.array(NETFLOW_SUPPLIES),
        name="netflow6x12",
    )


def incidence_matrix(n_nodes: int, arcs: Sequence[Tuple[int, int]]) -> np.ndarray:
    """Node-by-arc matrix, ``+1`` at each tail and ``-1`` at each head."""
    A = np.zeros((n_nodes, len(arcs)))
    for k, (tail, head) in enumerate(arcs):
        if tail == head or not (0 <= tail < n_nodes and 0 <= head < n_nodes):
            raise DimensionError(
                f"arc {k} ({tail}->{head}) is not a valid arc on "
                f"{n_nodes} nodes",
                agent_index=k,
            )
        A[tail, k] = 1.0
        A[head, k] = -1.0
    return A


def builtin_netflow(spec: Optional[NetworkSpec] = None) -> EmoProblem:
    """One agent per arc, ``W_k = A_k kron I_S``, ``d0 = b``.

    :raises InfeasibleProblemError: If supplies do not balance for some
        commodity
    """
    spec = spec or default_network_spec()
    b = spec.supply_matrix
    imbalance = np.abs(b.sum(axis=0))
    if np.any(imbalance > SUPPLY_BALANCE_TOLERANCE):
        raise InfeasibleProblemError(
            f"node supplies do not sum to zero (imbalance {imbalance.tolist()})",
            residual=float(imbalance.max()),
        )
    S = spec.commodities
    A = incidence_matrix(spec.n_nodes, spec.arcs)
    W = np.kron(A, np.eye(S))
    lo, hi = spec.capacity
    sets = [
        Interval(lo, hi) if S == 1 else Box(np.full(S, lo), np.full(S, hi))
        for _ in spec.arcs
    ]
    objectives = [SeparableQuadraticL1.uniform(S, a=1.0) for _ in spec.arcs]
    return from_matrix(W, b.reshape(-1), objectives, sets)


def netflow_graph(spec: Optional[NetworkSpec] = None) -> CommGraph:
    """Arcs communicate when they share an endpoint."""
    spec = spec or default_network_spec()
    return CommGraph.line_graph_of(spec.arcs, spec.n_nodes)


def builtin_minnorm(
    seed: int = 0, m: int = 3, n_agents: int = 4, q: int = 2
) -> Tuple[EmoProblem, CommGraph]:
    """``min sum ||x_i||^2`` s.t. ``W x = d0`` with seeded Gaussian data."""
    rng = np.random.default_rng(seed)
    W = rng.standard_normal((m, n_agents * q))
    d0 = rng.standard_normal(m)
    problem = from_matrix(
        W,
        d0,
        [SeparableQuadraticL1.uniform(q, a=1.0) for _ in range(n_agents)],
        [FullSpace(q) for _ in range(n_agents)],
    )
    return problem, CommGraph.ring(n_agents)


def least_norm_solution(problem: EmoProblem) -> np.ndarray:
    """``W^T (W W^T)^{-1} d0``, computed as the minimum-norm least squares
    solution."""
    return np.linalg.lstsq(problem.stacked.W, problem.d0, rcond=None)[0]


def random_instance(
    seed: int,
    max_agents: int = 6,
    max_dim: int = 3,
    max_m: int = 3,
) -> Tuple[EmoProblem, CommGraph]:
    """Seeded strictly convex instance with box sets and an interior
    feasible point.

    ``d0 = W x0`` for a point ``x0`` strictly inside the boxes, so the
    interior-point condition holds. The graph is a ring with random
    chords.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_agents + 1))
    m = int(rng.integers(1, max_m + 1))
    dims = [int(rng.integers(1, max_dim + 1)) for _ in range(n)]

    sets, objectives, interior = [], [], []
    for q in dims:
        lo = rng.uniform(-2.0, -0.5, q)
        hi = rng.uniform(0.5, 2.0, q)
        sets.append(Box(lo, hi))
        interior.append(lo + (hi - lo) * rng.uniform(0.2, 0.8, q))
        b = np.where(rng.uniform(size=q) < 0.5, rng.uniform(0.0, 1.0, q), 0.0)
        objectives.append(
            SeparableQuadraticL1(
                rng.uniform(0.5, 2.0, q), b, rng.uniform(-1.0, 1.0, q)
            )
        )
    W = rng.standard_normal((m, sum(dims)))
    d0 = W @ np.concatenate(interior)
    problem = from_matrix(W, d0, objectives, sets)

    edges = [(i, (i + 1) % n) for i in range(n)] if n > 2 else [(0, 1)]
    for i in range(n):
        for j in range(i + 2, n):
            if rng.uniform() < 0.3 and not (i == 0 and j == n - 1):
                edges.append((i, j))
    return problem, CommGraph.from_edges(n, edges)


def local_global_problem(
    objectives: Sequence[ObjectiveOracle],
    sets: Sequence[ConvexSet],
    local_constraints: Sequence[Tuple[np.ndarray, np.ndarray]],
    graph: CommGraph,
) -> EmoProblem:
    """Local constraints ``A_i x_i = b_i`` plus the consensus constraint
    ``(L_n kron I_q) x = 0``, as one EMO instance.

    ``W = [diag(A_1, ..., A_n); L_n kron I_q]`` and ``d0 = [b; 0]``. Agent
    ``i`` keeps its own ``b_i`` as its supply share.
    """
    n = len(sets)
    if not (len(objectives) == len(local_constraints) == n == graph.n):
        raise DimensionError(
            "need one objective, set and local constraint per graph node",
            expected=graph.n,
            actual=(len(objectives), n, len(local_constraints)),
        )
    q = sets[0].dim
    if any(s.dim != q for s in sets):
        raise DimensionError("all agents need the same dimension", expected=q)
    blocks = [np.atleast_2d(np.asarray(A, dtype=float)) for A, _ in local_constraints]
    rhs = [np.asarray(b, dtype=float).reshape(-1) for _, b in local_constraints]
    local_rows = [B.shape[0] for B in blocks]
    row_offsets = np.cumsum([0] + local_rows)
    m = int(row_offsets[-1]) + n * q
    consensus = np.kron(laplacian(graph), np.eye(q))

    agents = []
    for i in range(n):
        w_block = np.zeros((m, q))
        w_block[row_offsets[i] : row_offsets[i + 1], :] = blocks[i]
        w_block[row_offsets[-1] :, :] = consensus[:, i * q : (i + 1) * q]
        supply = np.zeros(m)
        supply[row_offsets[i] : row_offsets[i + 1]] = rhs[i]
        agents.append(AgentProblem(objectives[i], sets[i], w_block, supply))
    d0 = np.concatenate(rhs + [np.zeros(n * q)])
    return EmoProblem(agents=tuple(agents), m=m, d0=d0)


def _netflow_builtin(seed: int) -> Tuple[EmoProblem, CommGraph]:
    return builtin_netflow(), netflow_graph()


BUILTINS: Dict[str, Callable[[int], Tuple[EmoProblem, CommGraph]]] = {
    "nonsmooth10": lambda seed: builtin_nonsmooth10(),
    "netflow6x12": _netflow_builtin,
    "minnorm": lambda seed: builtin_minnorm(seed),
}


def load_builtin(name: str, seed: int = 0) -> Tuple[EmoProblem, CommGraph]:
    """Resolve a built-in name to its problem and default graph.

    :raises ConfigurationError: For an unknown name
    """
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown builtin '{name}', expected one of {sorted(BUILTINS)}",
            setting="builtin",
        ) from None
    return factory(seed)
