"""Communication graphs, Laplacians and neighbor-difference operators."""

from .graph import (
    CommGraph,
    algebraic_connectivity,
    components,
    is_connected,
    laplacian,
    neighbor_diff,
    stacked_laplacian,
)

__all__ = [
    "CommGraph",
    "algebraic_connectivity",
    "components",
    "is_connected",
    "laplacian",
    "neighbor_diff",
    "stacked_laplacian",
]
