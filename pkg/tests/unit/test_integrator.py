"""Tests for the forward Euler integrator and its stop rule."""

import numpy as np
import pytest

from distributed_emo.config.settings import Settings
from distributed_emo.diagnostics.equilibrium import build_equilibrium
from distributed_emo.diagnostics.fixtures import fixture_path, load_fixture
from distributed_emo.diagnostics.kkt import kkt_residual
from distributed_emo.dynamics.integrator import (
    StopRule,
    default_initial_state,
    integrate,
    primal_output,
)
from distributed_emo.dynamics.state import Algorithm, SolverState
from distributed_emo.exceptions import (
    ConnectivityError,
    IntegrationError,
    PreconditionError,
)
from distributed_emo.network.graph import CommGraph
from distributed_emo.problem.model import AgentProblem, EmoProblem
from distributed_emo.problem.objectives import SeparableQuadraticL1
from distributed_emo.problem.sets import Interval


def _static_problem(b: float) -> EmoProblem:
    """One agent whose zero state never moves."""
    agent = AgentProblem(
        SeparableQuadraticL1.uniform(1, a=1.0, b=b),
        Interval(-1.0, 1.0),
        np.zeros((1, 1)),
        np.zeros(1),
    )
    return EmoProblem(agents=(agent,), m=1, d0=np.zeros(1))


@pytest.mark.unit
class TestPreconditions:
    """Inputs rejected before the first step."""

    @pytest.mark.parametrize("h", [0.0, -1e-3, float("nan")])
    def test_bad_step(self, nonsmooth10, h):
        problem, graph = nonsmooth10
        with pytest.raises(PreconditionError) as exc_info:
            integrate(problem, graph, Algorithm.DPOFA, h=h, t_end=1.0)
        assert exc_info.value.parameter == "h"

    def test_ddfa_step_above_one(self, nonsmooth10):
        problem, graph = nonsmooth10
        with pytest.raises(PreconditionError):
            integrate(problem, graph, Algorithm.DDFA, h=1.5, t_end=10.0)

    def test_dpofa_accepts_large_step(self, nonsmooth10):
        problem, graph = nonsmooth10
        trajectory = integrate(
            problem, graph, Algorithm.DPOFA, h=1.5, t_end=3.0
        )
        assert trajectory.steps == 2

    def test_bad_horizon_and_stride(self, nonsmooth10):
        problem, graph = nonsmooth10
        with pytest.raises(PreconditionError):
            integrate(problem, graph, Algorithm.DDFA, t_end=0.0)
        with pytest.raises(PreconditionError):
            integrate(problem, graph, Algorithm.DDFA, sample_stride=0)

    def test_disconnected_graph(self, nonsmooth10):
        problem, _ = nonsmooth10
        graph = CommGraph.from_edges(10, [(i, i + 1) for i in range(8)])
        with pytest.raises(ConnectivityError):
            integrate(problem, graph, Algorithm.DPOFA, t_end=1.0)

    def test_non_finite_initial_state(self, nonsmooth10):
        problem, graph = nonsmooth10
        init = SolverState(np.zeros(10), np.full(20, np.nan), np.zeros(20))
        with pytest.raises(PreconditionError) as exc_info:
            integrate(problem, graph, Algorithm.DPOFA, init=init, t_end=1.0)
        assert exc_info.value.parameter == "init.lam"

    def test_ddfa_initial_point_outside_set(self, nonsmooth10):
        problem, graph = nonsmooth10
        init = SolverState(np.full(10, 2.0), np.zeros(20), np.zeros(20))
        with pytest.raises(PreconditionError):
            integrate(problem, graph, Algorithm.DDFA, init=init, t_end=1.0)

    def test_stop_rule_validation(self):
        with pytest.raises(PreconditionError):
            StopRule(tol=0.0)
        with pytest.raises(PreconditionError):
            StopRule(dwell=0)


@pytest.mark.unit
class TestIntegrate:
    """Stepping, sampling and stopping."""

    def test_default_initial_states(self, netflow):
        problem, _ = netflow
        dpofa = default_initial_state(problem, Algorithm.DPOFA)
        ddfa = default_initial_state(problem, Algorithm.DDFA)
        assert np.all(dpofa.primal == 0.0)
        assert np.all(ddfa.primal == 0.0)
        assert ddfa.lam.shape == (problem.n * problem.m,)

    def test_primal_output_projects_dpofa_state(self, nonsmooth10):
        problem, _ = nonsmooth10
        state = SolverState(np.full(10, 3.0), np.zeros(20), np.zeros(20))
        np.testing.assert_array_equal(
            primal_output(problem, Algorithm.DPOFA, state), np.ones(10)
        )

    def test_times_are_computed(self, nonsmooth10):
        problem, graph = nonsmooth10
        trajectory = integrate(
            problem, graph, Algorithm.DDFA, h=0.1, t_end=1.0
        )
        assert trajectory.steps == 10
        assert trajectory.final_state.t == 1.0
        assert trajectory.stop_reason == "t_end"
        assert not trajectory.converged

    def test_sample_stride(self, nonsmooth10):
        problem, graph = nonsmooth10
        trajectory = integrate(
            problem, graph, Algorithm.DPOFA, h=0.1, t_end=1.0, sample_stride=3
        )
        np.testing.assert_allclose(trajectory.times, [0.0, 0.3, 0.6, 0.9])
        assert len(trajectory.primal_norms_sq) == 4
        assert trajectory.samples[0].f_value == 0.0

    def test_observer_sees_every_step(self, nonsmooth10):
        problem, graph = nonsmooth10
        seen = []
        integrate(
            problem,
            graph,
            Algorithm.DDFA,
            h=0.1,
            t_end=1.0,
            observer=lambda k, state, x: seen.append((k, state.t)),
        )
        assert [k for k, _ in seen] == list(range(11))
        assert seen[0][1] == 0.0

    def test_stops_at_equilibrium(self, nonsmooth10):
        problem, graph = nonsmooth10
        fixture = load_fixture(fixture_path("nonsmooth10"))
        for algorithm in Algorithm:
            eq = build_equilibrium(
                problem, graph, fixture.x_star, fixture.lambda_bar, algorithm
            )
            trajectory = integrate(
                problem,
                graph,
                algorithm,
                init=eq.state(algorithm),
                h=1e-2,
                t_end=10.0,
                stop=StopRule(tol=1e-8, dwell=5),
            )
            assert trajectory.converged
            assert trajectory.stop_reason == "tolerance"
            assert trajectory.steps == 4
            np.testing.assert_allclose(
                trajectory.final_x, fixture.x_star, atol=1e-12
            )

    def test_consensus_gap_does_not_block_stop(self, nonsmooth10):
        problem, graph = nonsmooth10
        fixture = load_fixture(fixture_path("nonsmooth10"))
        eq = build_equilibrium(
            problem, graph, fixture.x_star, fixture.lambda_bar, Algorithm.DDFA
        )
        state = eq.state(Algorithm.DDFA).copy()
        # Agent 1 couples only through the first row, so its second
        # multiplier component is invisible to stationarity
        state.lam[3] += 1e-3
        report = kkt_residual(problem, state.primal, state.lam, graph)
        assert report.consensus > 1e-6
        assert max(report.stationarity, report.feasibility) <= 1e-12

        trajectory = integrate(
            problem,
            graph,
            Algorithm.DDFA,
            init=state,
            h=1e-2,
            t_end=0.5,
            stop=StopRule(tol=1e-6, dwell=1),
        )
        assert trajectory.converged
        assert trajectory.stop_reason == "tolerance"
        assert trajectory.steps == 0

    def test_stop_rule_from_settings(self):
        settings = Settings(default_tol=1e-4, stop_dwell=7, chatter_window=50)
        assert StopRule.from_settings(settings) == StopRule(1e-4, 7, 50)
        assert StopRule.from_settings(settings, tol=1e-9).tol == 1e-9

    def test_iterates_stay_in_set(self, nonsmooth10):
        problem, graph = nonsmooth10
        for algorithm in Algorithm:
            trajectory = integrate(
                problem, graph, algorithm, h=0.2, t_end=20.0
            )
            assert trajectory.max_set_violation <= 1e-12

    def test_z_mass_is_conserved(self, netflow):
        problem, graph = netflow
        trajectory = integrate(
            problem, graph, Algorithm.DPOFA, h=1e-2, t_end=5.0
        )
        assert trajectory.z_mass_drift <= 1e-8

    def test_divergence_raises(self, minnorm):
        problem, graph = minnorm
        with np.errstate(all="ignore"):
            with pytest.raises(IntegrationError) as exc_info:
                integrate(problem, graph, Algorithm.DPOFA, h=1e3, t_end=1e6)
        assert exc_info.value.step is not None

    def test_chattering_halves_step_once(self):
        problem = _static_problem(b=1.0)
        trajectory = integrate(
            problem,
            CommGraph.ring(1),
            Algorithm.DDFA,
            h=0.1,
            t_end=1.0,
            stop=StopRule(tol=1e-6, dwell=1000, chatter_window=5),
        )
        assert len(trajectory.step_changes) == 1
        change = trajectory.step_changes[0]
        assert change.step_index == 5
        assert change.time == pytest.approx(0.5)
        assert trajectory.final_step == pytest.approx(0.05)
        assert trajectory.steps == 15

    def test_smooth_problem_keeps_step(self):
        problem = _static_problem(b=0.0)
        trajectory = integrate(
            problem,
            CommGraph.ring(1),
            Algorithm.DDFA,
            h=0.1,
            t_end=1.0,
            stop=StopRule(tol=1e-6, dwell=1000, chatter_window=5),
        )
        assert trajectory.step_changes == []
        assert trajectory.steps == 10
