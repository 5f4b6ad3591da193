"""Built-in experiment instances and config resolution."""

from .builtins import (
    BUILTINS,
    NETFLOW_ARCS,
    NETFLOW_SUPPLIES,
    NONSMOOTH10_D0,
    NONSMOOTH10_MATRIX,
    NetworkSpec,
    builtin_minnorm,
    builtin_netflow,
    builtin_nonsmooth10,
    default_network_spec,
    from_matrix,
    incidence_matrix,
    least_norm_solution,
    load_builtin,
    local_global_problem,
    netflow_graph,
    random_instance,
)
from .resolve import (
    ResolvedExperiment,
    build_graph,
    build_inline_problem,
    initial_state,
    resolve_experiment,
)

__all__ = [
    "BUILTINS",
    "NETFLOW_ARCS",
    "NETFLOW_SUPPLIES",
    "NONSMOOTH10_D0",
    "NONSMOOTH10_MATRIX",
    "NetworkSpec",
    "ResolvedExperiment",
    "build_graph",
    "build_inline_problem",
    "builtin_minnorm",
    "builtin_netflow",
    "builtin_nonsmooth10",
    "default_network_spec",
    "from_matrix",
    "incidence_matrix",
    "initial_state",
    "least_norm_solution",
    "load_builtin",
    "local_global_problem",
    "netflow_graph",
    "random_instance",
]
