"""Weighted undirected communication graphs and Laplacian operators.

Graphs are stored densely; agent counts stay in the hundreds at most.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from ..exceptions import DimensionError, ValidationError

logger = logging.getLogger(__name__)

Edge = Union[Tuple[int, int], Tuple[int, int, float]]


@dataclass(frozen=True, eq=False)
class CommGraph:
    """Communication graph given by a symmetric weighted adjacency matrix.

    :param adjacency: Symmetric ``n x n`` matrix, zero diagonal, entries
        ``a_ij >= 0``
    """

    adjacency: np.ndarray

    def __post_init__(self) -> None:
        A = np.array(self.adjacency, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
            raise DimensionError(
                "adjacency must be a non-empty square matrix",
                actual=A.shape,
            )
        if not np.all(np.isfinite(A)):
            raise ValidationError("adjacency must be finite", field="adjacency")
        if not np.array_equal(A, A.T):
            raise ValidationError(
                "adjacency must be exactly symmetric", field="adjacency"
            )
        if np.any(np.diag(A) != 0.0):
            raise ValidationError(
                "adjacency must have a zero diagonal", field="adjacency"
            )
        if np.any(A < 0.0):
            raise ValidationError(
                "edge weights must be nonnegative", field="adjacency"
            )
        A.setflags(write=False)
        object.__setattr__(self, "adjacency", A)

    @property
    def n(self) -> int:
        return int(self.adjacency.shape[0])

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> "CommGraph":
        """Build from ``(i, j)`` or ``(i, j, weight)`` tuples (0-based).

        A repeated edge keeps the last weight given.
        """
        if n < 1:
            raise ValidationError("graph needs at least one node", field="n")
        A = np.zeros((n, n))
        for edge in edges:
            i, j = int(edge[0]), int(edge[1])
            weight = float(edge[2]) if len(edge) > 2 else 1.0  # type: ignore[misc]
            if not (0 <= i < n and 0 <= j < n):
                raise ValidationError(
                    f"edge ({i}, {j}) out of range for {n} nodes",
                    field="edges",
                )
            if i == j:
                raise ValidationError(
                    f"self-loop on node {i}", field="edges", value=edge
                )
            A[i, j] = A[j, i] = weight
        return cls(A)

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> "CommGraph":
        """Convert an undirected networkx graph with nodes ``0..n-1``."""
        if graph.is_directed():
            raise ValidationError("graph must be undirected", field="graph")
        n = graph.number_of_nodes()
        return cls(nx.to_numpy_array(graph, nodelist=range(n), weight="weight"))

    @classmethod
    def ring(cls, n: int) -> "CommGraph":
        if n < 3:
            return cls.path(n)
        return cls.from_networkx(nx.cycle_graph(n))

    @classmethod
    def path(cls, n: int) -> "CommGraph":
        return cls.from_networkx(nx.path_graph(n))

    @classmethod
    def complete(cls, n: int) -> "CommGraph":
        return cls.from_networkx(nx.complete_graph(n))

    @classmethod
    def line_graph_of(
        cls, arcs: Sequence[Tuple[int, int]], n_nodes: int
    ) -> "CommGraph":
        """Graph on arcs: two arcs communicate when they share an endpoint.

        :param arcs: ``(tail, head)`` pairs, 0-based node indices
        :param n_nodes: Number of nodes of the underlying digraph
        """
        for tail, head in arcs:
            if not (0 <= tail < n_nodes and 0 <= head < n_nodes):
                raise ValidationError(
                    f"arc ({tail}, {head}) outside nodes 0..{n_nodes - 1}",
                    field="arcs",
                )
        edges = []
        for k, (tail_k, head_k) in enumerate(arcs):
            for j in range(k + 1, len(arcs)):
                if {tail_k, head_k} & set(arcs[j]):
                    edges.append((k, j))
        return cls.from_edges(len(arcs), edges)

    def to_networkx(self) -> nx.Graph:
        return nx.from_numpy_array(self.adjacency)

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency)))


@lru_cache(maxsize=64)
def laplacian(graph: CommGraph) -> np.ndarray:
    """Weighted Laplacian ``L_n = D - A``."""
    A = graph.adjacency
    L = np.diag(A.sum(axis=1)) - A
    L.setflags(write=False)
    return L


@lru_cache(maxsize=64)
def stacked_laplacian(graph: CommGraph, m: int) -> np.ndarray:
    """``L = L_n kron I_m`` acting on stacked multipliers."""
    L = np.kron(laplacian(graph), np.eye(m))
    L.setflags(write=False)
    return L


def is_connected(graph: CommGraph) -> bool:
    """True iff the graph has a single connected component."""
    return bool(nx.is_connected(graph.to_networkx()))


def components(graph: CommGraph) -> List[List[int]]:
    """Connected components as sorted node lists."""
    return sorted(
        sorted(int(v) for v in c)
        for c in nx.connected_components(graph.to_networkx())
    )


def algebraic_connectivity(graph: CommGraph) -> float:
    """Second-smallest Laplacian eigenvalue (0 for a single node)."""
    if graph.n == 1:
        return 0.0
    return float(np.linalg.eigvalsh(laplacian(graph))[1])


def neighbor_diff(
    graph: CommGraph, values: Sequence[np.ndarray] | np.ndarray
) -> np.ndarray:
    """``out_i = sum_j a_ij (values_i - values_j)`` for every agent.

    :param values: ``n`` vectors of a common length ``m``, or an ``(n, m)``
        array
    :return: ``(n, m)`` array of neighbor differences
    :raises DimensionError: If the number of rows is not ``n``
    """
    try:
        stacked = np.array(values, dtype=float)
    except ValueError as exc:
        raise DimensionError("agent vectors must share one length") from exc
    if stacked.ndim == 1:
        stacked = stacked.reshape(-1, 1)
    if stacked.ndim != 2 or stacked.shape[0] != graph.n:
        raise DimensionError(
            f"expected {graph.n} agent vectors, got {stacked.shape[0]}",
            expected=graph.n,
            actual=stacked.shape[0],
        )
    return laplacian(graph) @ stacked
