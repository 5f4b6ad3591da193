"""Tests for the built-in experiment instances."""

import numpy as np
import pytest

from distributed_emo.exceptions import (
    ConfigurationError,
    DimensionError,
    InfeasibleProblemError,
)
from distributed_emo.experiments.builtins import (
    BUILTINS,
    NETFLOW_ARCS,
    NETFLOW_SUPPLIES,
    NetworkSpec,
    builtin_netflow,
    builtin_nonsmooth10,
    incidence_matrix,
    least_norm_solution,
    load_builtin,
    local_global_problem,
    random_instance,
)
from distributed_emo.network.graph import CommGraph, is_connected
from distributed_emo.problem.model import slater_margin
from distributed_emo.problem.objectives import SeparableQuadraticL1
from distributed_emo.problem.sets import Box, FullSpace, Interval


@pytest.mark.unit
class TestNonsmooth10:
    """Ten-agent nonsmooth instance."""

    def test_layout(self):
        problem, graph = builtin_nonsmooth10()
        assert graph.n == 10 and graph.edge_count == 10
        np.testing.assert_array_equal(problem.agents[3].w_block, [[0.0], [1.0]])
        np.testing.assert_allclose(
            np.sum([a.supply for a in problem.agents], axis=0), [3.0, 2.0]
        )
        assert all(
            isinstance(a.constraint_set, Interval) for a in problem.agents
        )
        assert not problem.smooth
        assert not problem.stacked.Omega.contains(np.full(10, 1.5))


@pytest.mark.unit
class TestNetflow:
    """Network-flow instance."""

    def test_supplies_balance(self):
        assert sum(NETFLOW_SUPPLIES) == pytest.approx(0.0, abs=1e-12)

    def test_incidence_orientation(self):
        A = incidence_matrix(6, [(1, 4)])
        assert A[1, 0] == 1.0
        assert A[4, 0] == -1.0
        assert np.count_nonzero(A) == 2

    def test_incidence_rejects_bad_arcs(self):
        with pytest.raises(DimensionError):
            incidence_matrix(3, [(0, 3)])
        with pytest.raises(DimensionError):
            incidence_matrix(3, [(1, 1)])

    def test_layout(self, netflow):
        problem, graph = netflow
        assert problem.n == 12 and problem.m == 6
        np.testing.assert_array_equal(problem.d0, NETFLOW_SUPPLIES)
        np.testing.assert_array_equal(
            problem.stacked.W, incidence_matrix(6, NETFLOW_ARCS)
        )
        assert is_connected(graph)

    def test_capacity_clamp(self, netflow):
        problem, _ = netflow
        constraint_set = problem.agents[0].constraint_set
        assert constraint_set.project_array(np.array([12.0]))[0] == 10.0

    def test_slater_feasible(self, netflow):
        problem, _ = netflow
        assert slater_margin(problem) > 0.0

    def test_imbalanced_supplies(self):
        spec = NetworkSpec(
            n_nodes=2, arcs=((0, 1),), supplies=np.array([1.0, -0.5])
        )
        with pytest.raises(InfeasibleProblemError):
            builtin_netflow(spec)

    def test_multiple_commodities(self):
        spec = NetworkSpec(
            n_nodes=3,
            arcs=((0, 1), (1, 2)),
            supplies=np.array([[1.0, 2.0], [0.0, 0.0], [-1.0, -2.0]]),
        )
        problem = builtin_netflow(spec)
        assert problem.m == 6
        assert problem.dims == (2, 2)
        assert isinstance(problem.agents[0].constraint_set, Box)
        np.testing.assert_array_equal(
            problem.agents[0].w_block[:2], np.eye(2)
        )


@pytest.mark.unit
class TestOtherInstances:
    """Least-norm, random and local/global instances."""

    def test_minnorm(self, minnorm):
        problem, graph = minnorm
        assert problem.stacked.W.shape == (3, 8)
        assert all(isinstance(a.constraint_set, FullSpace) for a in problem.agents)
        x = least_norm_solution(problem)
        np.testing.assert_allclose(problem.stacked.W @ x, problem.d0, atol=1e-12)

    def test_minnorm_is_seeded(self):
        first, _ = load_builtin("minnorm", seed=4)
        second, _ = load_builtin("minnorm", seed=4)
        np.testing.assert_array_equal(first.stacked.W, second.stacked.W)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_instances_are_valid(self, seed):
        problem, graph = random_instance(seed)
        assert 2 <= problem.n <= 6
        assert graph.n == problem.n
        assert is_connected(graph)
        assert slater_margin(problem) > 0.0

    def test_local_global_problem(self):
        graph = CommGraph.path(3)
        objectives = [SeparableQuadraticL1.uniform(2) for _ in range(3)]
        sets = [FullSpace(2) for _ in range(3)]
        local = [
            (np.array([[1.0, 0.0]]), np.array([1.0])),
            (np.array([[0.0, 1.0]]), np.array([2.0])),
            (np.array([[1.0, 1.0]]), np.array([0.5])),
        ]
        problem = local_global_problem(objectives, sets, local, graph)
        assert problem.m == 3 + 6
        np.testing.assert_array_equal(
            problem.d0, [1.0, 2.0, 0.5] + [0.0] * 6
        )
        # Consensus x is feasible for the Laplacian rows
        x = np.tile([0.25, 0.75], 3)
        residual = problem.stacked.W @ x - problem.d0
        np.testing.assert_allclose(residual[3:], 0.0, atol=1e-15)

    def test_local_global_dimension_checks(self):
        with pytest.raises(DimensionError):
            local_global_problem(
                [SeparableQuadraticL1.uniform(1)],
                [FullSpace(1)],
                [(np.ones((1, 1)), np.ones(1))],
                CommGraph.path(2),
            )

    def test_registry(self):
        assert sorted(BUILTINS) == ["minnorm", "netflow6x12", "nonsmooth10"]
        with pytest.raises(ConfigurationError) as exc_info:
            load_builtin("knapsack")
        assert exc_info.value.setting == "builtin"
