"""End-to-end runs of both flows on the built-in experiments.

These simulate long horizons and compare the limits against the
committed oracle fixtures.
"""

import json

import numpy as np
import pytest

from distributed_emo.cli.runner import (
    EXIT_INVALID,
    EXIT_OK,
    main,
)
from distributed_emo.diagnostics import (
    LyapunovMonitor,
    boundedness_report,
    build_equilibrium,
    fixture_path,
    kkt_residual,
    load_fixture,
    solve_centralized,
)
from distributed_emo.dynamics import (
    Algorithm,
    ddfa_rhs,
    dpofa_rhs,
    integrate,
)
from distributed_emo.experiments.builtins import (
    builtin_minnorm,
    builtin_netflow,
    builtin_nonsmooth10,
    least_norm_solution,
    netflow_graph,
    random_instance,
)

ALGORITHMS = [Algorithm.DPOFA, Algorithm.DDFA]


@pytest.fixture(scope="module", params=ALGORITHMS, ids=lambda a: a.value)
def nonsmooth_run(request):
    problem, graph = builtin_nonsmooth10()
    trajectory = integrate(
        problem, graph, request.param, h=1e-2, t_end=100.0, sample_stride=10
    )
    return problem, graph, trajectory


@pytest.fixture(scope="module", params=ALGORITHMS, ids=lambda a: a.value)
def netflow_run(request):
    problem, graph = builtin_netflow(), netflow_graph()
    seen = []

    def record_box_violation(step, state, x):
        seen.append(float(max(np.max(-x), np.max(x - 10.0), 0.0)))

    trajectory = integrate(
        problem,
        graph,
        request.param,
        h=1e-2,
        t_end=150.0,
        sample_stride=10,
        observer=record_box_violation,
    )
    return problem, graph, trajectory, seen


@pytest.mark.integration
class TestNonsmoothExperiment:
    """Ten scalar agents with an l1 term, on a ring."""

    def test_feasible_limit(self, nonsmooth_run):
        problem, _, trajectory = nonsmooth_run
        residual = problem.stacked.W @ trajectory.final_x - problem.d0
        assert float(residual @ residual) <= 1e-6

    def test_stationary_limit(self, nonsmooth_run):
        problem, graph, trajectory = nonsmooth_run
        report = kkt_residual(
            problem, trajectory.final_x, trajectory.final_state.lam, graph
        )
        assert report.stationarity <= 1e-4
        assert report.consensus <= 1e-4

    def test_matches_oracle_fixture(self, nonsmooth_run):
        _, _, trajectory = nonsmooth_run
        fixture = load_fixture(fixture_path("nonsmooth10"))
        gap = np.max(np.abs(trajectory.final_x - fixture.x_star))
        assert gap <= 1e-3

    def test_invariants(self, nonsmooth_run):
        _, _, trajectory = nonsmooth_run
        assert trajectory.max_set_violation <= 1e-10
        assert trajectory.z_mass_drift <= 1e-8

    def test_no_late_blow_up(self, nonsmooth_run):
        _, _, trajectory = nonsmooth_run
        assert boundedness_report(trajectory).bounded


@pytest.mark.integration
class TestNetflowExperiment:
    """Single-commodity flow with capacities [0, 10]."""

    def test_flows_stay_within_capacity(self, netflow_run):
        _, _, trajectory, seen = netflow_run
        assert len(seen) == trajectory.steps + 1
        assert max(seen) <= 1e-10

    def test_conservation_and_oracle_gap(self, netflow_run):
        problem, _, trajectory, _ = netflow_run
        residual = problem.stacked.W @ trajectory.final_x - problem.d0
        assert float(residual @ residual) <= 1e-6
        fixture = load_fixture(fixture_path("netflow6x12"))
        assert np.max(np.abs(trajectory.final_x - fixture.x_star)) <= 1e-3

    def test_invariants(self, netflow_run):
        _, _, trajectory, _ = netflow_run
        assert trajectory.z_mass_drift <= 1e-8
        assert boundedness_report(trajectory).bounded


@pytest.mark.integration
def test_ddfa_reaches_least_norm_solution():
    problem, graph = builtin_minnorm(seed=0)
    trajectory = integrate(
        problem, graph, Algorithm.DDFA, h=1e-2, t_end=200.0, sample_stride=50
    )
    expected = least_norm_solution(problem)
    assert np.max(np.abs(trajectory.final_x - expected)) <= 1e-4
    report = kkt_residual(
        problem, trajectory.final_x, trajectory.final_state.lam, graph
    )
    assert report.max_residual <= 1e-4


@pytest.mark.integration
@pytest.mark.parametrize("seed", range(20))
def test_oracle_equilibria_are_rest_points(seed):
    problem, graph = random_instance(seed)
    solution = solve_centralized(problem, tol=1e-10)
    for algorithm in ALGORITHMS:
        eq = build_equilibrium(
            problem, graph, solution.x_star, solution.lambda_bar, algorithm
        )
        state = eq.state(algorithm)
        if algorithm is Algorithm.DPOFA:
            rhs = dpofa_rhs(problem, graph, state)
            velocity = np.concatenate([rhs.dy, rhs.dlam, rhs.dz])
        else:
            rhs = ddfa_rhs(problem, graph, state)
            velocity = np.concatenate([rhs.dx, rhs.dlam, rhs.dz])
        assert np.linalg.norm(velocity) <= 1e-8


@pytest.mark.integration
@pytest.mark.slow
@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("algorithm", ALGORITHMS, ids=lambda a: a.value)
def test_stopped_runs_satisfy_kkt(seed, algorithm):
    problem, graph = random_instance(seed)
    trajectory = integrate(
        problem, graph, algorithm, h=1e-2, t_end=300.0, sample_stride=100
    )
    if not trajectory.converged:
        pytest.skip(f"seed {seed} did not meet the stop rule by t_end")
    report = kkt_residual(
        problem, trajectory.final_x, trajectory.final_state.lam, graph
    )
    assert report.stationarity <= 1e-5
    assert report.feasibility <= 1e-5
    solution = solve_centralized(problem, tol=1e-10)
    assert np.max(np.abs(trajectory.final_x - solution.x_star)) <= 1e-3


def _lyapunov_violations(problem, graph, algorithm, eq, h, t_end):
    monitor = LyapunovMonitor(problem, graph, algorithm, eq)
    integrate(
        problem,
        graph,
        algorithm,
        h=h,
        t_end=t_end,
        sample_stride=1000,
        observer=monitor,
    )
    return monitor.violations(slack=1e-6)


@pytest.mark.integration
@pytest.mark.slow
@pytest.mark.parametrize("algorithm", ALGORITHMS, ids=lambda a: a.value)
def test_lyapunov_values_do_not_increase(algorithm):
    problem, graph = builtin_minnorm(seed=0)
    solution = solve_centralized(problem, tol=1e-10)
    eq = build_equilibrium(
        problem, graph, solution.x_star, solution.lambda_bar, algorithm
    )
    h = 1e-3
    violations = _lyapunov_violations(problem, graph, algorithm, eq, h, 10.0)
    if violations:
        # Second-order Euler terms can exceed the slack on the first pass
        violations = _lyapunov_violations(
            problem, graph, algorithm, eq, h / 10.0, 10.0
        )
    assert violations == 0


@pytest.mark.integration
@pytest.mark.slow
@pytest.mark.parametrize("name", ["nonsmooth10", "netflow6x12"])
@pytest.mark.parametrize("algorithm", ALGORITHMS, ids=lambda a: a.value)
def test_lyapunov_decreases_on_fixture_experiments(name, algorithm):
    if name == "nonsmooth10":
        problem, graph = builtin_nonsmooth10()
    else:
        problem, graph = builtin_netflow(), netflow_graph()
    fixture = load_fixture(fixture_path(name))
    eq = build_equilibrium(
        problem, graph, fixture.x_star, fixture.lambda_bar, algorithm
    )
    h, t_end = 1e-3, 20.0
    violations = _lyapunov_violations(problem, graph, algorithm, eq, h, t_end)
    if violations:
        violations = _lyapunov_violations(
            problem, graph, algorithm, eq, h / 10.0, t_end
        )
    assert violations == 0


@pytest.mark.integration
class TestCommandLine:
    """The ``run`` command end to end."""

    def test_runs_both_algorithms(self, tmp_path):
        code = main(
            [
                "run",
                "--builtin",
                "nonsmooth10",
                "--algorithm",
                "both",
                "--t-end",
                "200",
                "--out",
                str(tmp_path),
            ]
        )
        assert code == EXIT_OK
        for algorithm in ("dpofa", "ddfa"):
            stem = f"nonsmooth10_{algorithm}"
            assert (tmp_path / f"{stem}.csv").exists()
            assert (tmp_path / f"{stem}_summary.txt").exists()
            data = json.loads((tmp_path / f"{stem}_summary.json").read_text())
            assert data["converged"]
            assert data["eq_residual_sq"] <= 1e-6
            assert data["oracle_gap"] <= 1e-3

    def test_unknown_builtin(self, tmp_path):
        code = main(["run", "--builtin", "knapsack", "--out", str(tmp_path)])
        assert code == EXIT_INVALID
        assert list(tmp_path.iterdir()) == []
