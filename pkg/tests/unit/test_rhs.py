"""Tests for the DPOFA and DDFA right-hand sides and selections."""

import numpy as np
import pytest

from distributed_emo.diagnostics.equilibrium import build_equilibrium
from distributed_emo.diagnostics.fixtures import fixture_path, load_fixture
from distributed_emo.dynamics.rhs import ddfa_rhs, dpofa_rhs, operators
from distributed_emo.dynamics.selection import (
    ddfa_selection,
    dpofa_selection,
    projected_residual,
)
from distributed_emo.dynamics.state import Algorithm, SolverState
from distributed_emo.exceptions import DimensionError, IntegrationError
from distributed_emo.network.graph import CommGraph
from distributed_emo.problem.objectives import SeparableQuadraticL1
from distributed_emo.problem.sets import Interval


def _random_state(problem, rng, inside=True):
    N, nm = problem.total_dim, problem.n * problem.m
    primal = rng.standard_normal(N)
    if inside:
        primal = problem.stacked.Omega.project_array(primal)
    return SolverState(primal, rng.standard_normal(nm), rng.standard_normal(nm))


@pytest.mark.unit
class TestSelections:
    """Subgradient selections at and away from kinks."""

    def test_oracle_selection_is_sign(self):
        f = SeparableQuadraticL1.uniform(2, a=1.0, b=1.0)
        x = np.array([0.0, 0.5])
        g = ddfa_selection(f, x, np.array([0.3, 9.0]), "oracle")
        np.testing.assert_array_equal(g, [0.0, 2.0])

    def test_min_norm_selection_at_kink(self):
        f = SeparableQuadraticL1.uniform(2, a=1.0, b=1.0)
        x = np.array([0.0, 0.0])
        g = ddfa_selection(f, x, np.array([0.3, 5.0]))
        np.testing.assert_array_equal(g, [0.3, 1.0])

    def test_min_norm_minimizes_velocity(self, rng):
        f = SeparableQuadraticL1.uniform(1, a=1.0, b=1.0)
        interval = Interval(-1.0, 1.0)
        x = np.array([0.0])
        for v in rng.uniform(-3.0, 3.0, 20):
            best = np.abs(
                projected_residual(f, interval, x, np.array([v]))
            )[0]
            for g in np.linspace(-1.0, 1.0, 41):
                p = interval.project_array(x - g + v) - x
                assert best <= abs(p[0]) + 1e-15

    def test_dpofa_selection_inside_box(self):
        f = SeparableQuadraticL1.uniform(1, a=1.0, b=1.0)
        g = dpofa_selection(f, np.array([0.0]), np.array([-0.2]), np.array([0.1]))
        np.testing.assert_allclose(g, [0.3])

    def test_selections_agree_on_smooth_objectives(self, rng):
        f = SeparableQuadraticL1.uniform(3, a=2.0)
        x, v = rng.standard_normal(3), rng.standard_normal(3)
        np.testing.assert_allclose(
            ddfa_selection(f, x, v, "min_norm"),
            ddfa_selection(f, x, v, "oracle"),
        )


@pytest.mark.unit
class TestRhs:
    """Vector fields of both flows."""

    def test_dpofa_output_is_projection(self, nonsmooth10, rng):
        problem, graph = nonsmooth10
        state = _random_state(problem, rng, inside=False)
        state.primal *= 3.0
        derivative = dpofa_rhs(problem, graph, state)
        np.testing.assert_array_equal(
            derivative.x, np.clip(state.primal, -1.0, 1.0)
        )

    def test_dz_conserves_z_mass(self, nonsmooth10, rng):
        problem, graph = nonsmooth10
        state = _random_state(problem, rng)
        for derivative in (
            dpofa_rhs(problem, graph, state),
            ddfa_rhs(problem, graph, state),
        ):
            mass = derivative.dz.reshape(problem.n, problem.m).sum(axis=0)
            np.testing.assert_allclose(mass, 0.0, atol=1e-12)

    def test_ddfa_keeps_direction_feasible(self, netflow, rng):
        problem, graph = netflow
        state = _random_state(problem, rng)
        derivative = ddfa_rhs(problem, graph, state)
        np.testing.assert_allclose(
            problem.stacked.Omega.project_array(state.primal + derivative.dx),
            state.primal + derivative.dx,
        )

    def test_ddfa_derivative_term(self, netflow, rng):
        problem, graph = netflow
        state = _random_state(problem, rng)
        ops = operators(problem, graph)
        derivative = ddfa_rhs(problem, graph, state)
        expected = (
            ops.d
            - ops.Wbar @ (state.primal + derivative.dx)
            - ops.L @ state.lam
            - ops.L @ state.z
        )
        np.testing.assert_allclose(derivative.dlam, expected)

    def test_ddfa_rejects_point_outside_set(self, nonsmooth10):
        problem, graph = nonsmooth10
        state = SolverState(np.full(10, 1.5), np.zeros(20), np.zeros(20))
        with pytest.raises(IntegrationError):
            ddfa_rhs(problem, graph, state)

    def test_state_dimension_checked(self, nonsmooth10):
        problem, graph = nonsmooth10
        state = SolverState(np.zeros(9), np.zeros(20), np.zeros(20))
        with pytest.raises(DimensionError):
            dpofa_rhs(problem, graph, state)

    def test_graph_size_checked(self, nonsmooth10):
        problem, _ = nonsmooth10
        state = SolverState(np.zeros(10), np.zeros(20), np.zeros(20))
        with pytest.raises(DimensionError):
            dpofa_rhs(problem, CommGraph.ring(4), state)

    @pytest.mark.parametrize("algorithm", list(Algorithm))
    def test_equilibrium_is_rest_point(self, nonsmooth10, algorithm):
        problem, graph = nonsmooth10
        fixture = load_fixture(fixture_path("nonsmooth10"))
        eq = build_equilibrium(
            problem, graph, fixture.x_star, fixture.lambda_bar, algorithm
        )
        state = eq.state(algorithm)
        if algorithm is Algorithm.DPOFA:
            d = dpofa_rhs(problem, graph, state)
            blocks = (d.dy, d.dlam, d.dz)
        else:
            d = ddfa_rhs(problem, graph, state)
            blocks = (d.dx, d.dlam, d.dz)
        for block in blocks:
            assert np.max(np.abs(block)) <= 1e-12
