"""Command-line runner for distributed EMO experiments.

Runs DPOFA, DDFA or both on a built-in instance or a YAML experiment,
then writes per-run telemetry CSVs and summary reports::

    distributed-emo run --builtin nonsmooth10 --algorithm both
    distributed-emo run --config experiments/flow.yaml --h 0.005 --out runs

Exit codes: 0 when every run met the stop rule before ``t_end``, 1 when
some run did not, 2 for invalid configuration or problem data, 3 when a
run aborted numerically.
"""

import argparse
import asyncio
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv

from ..config.experiment import ExperimentConfig, load_experiment_config
from ..config.settings import Settings, get_settings
from ..diagnostics.fixtures import find_fixture
from ..diagnostics.kkt import kkt_residual, objective_value
from ..dynamics.integrator import StopRule, integrate
from ..dynamics.state import Algorithm, Trajectory
from ..exceptions import (
    ConfigurationError,
    EmoError,
    FixtureError,
    IntegrationError,
    OracleConvergenceError,
    PreconditionError,
    ValidationError,
)
from ..experiments.resolve import (
    ResolvedExperiment,
    initial_state,
    resolve_experiment,
)
from ..models.reports import RunSummary
from ..problem.model import validate
from ..utils.log_config import setup_logging
from .telemetry import write_summary, write_telemetry

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


@dataclass(frozen=True)
class RunOutcome:
    """One finished run and where its artifacts went."""

    summary: RunSummary
    trajectory: Trajectory
    csv_path: Path
    summary_path: Path
    json_path: Path


def _oracle_gap(
    name: str, resolved: ResolvedExperiment, x: np.ndarray
) -> Optional[float]:
    try:
        fixture = find_fixture(name, resolved.problem)
    except FixtureError as exc:
        logger.warning("Ignoring unreadable fixture: %s", exc.message)
        return None
    if fixture is None:
        return None
    return float(np.max(np.abs(x - fixture.x_star)))


def run_single(
    config: ExperimentConfig,
    resolved: ResolvedExperiment,
    algorithm: Algorithm,
    stop: StopRule,
    out_dir: Path,
) -> RunOutcome:
    """Simulate one algorithm and write its telemetry and summary."""
    problem, graph = resolved.problem, resolved.graph
    init = initial_state(config, problem, algorithm)
    started = time.perf_counter()
    trajectory = integrate(
        problem,
        graph,
        algorithm,
        init=init,
        h=config.h,  # type: ignore[arg-type]
        t_end=config.t_end,  # type: ignore[arg-type]
        stop=stop,
        sample_stride=config.sample_stride or 1,
        selection=config.selection or "min_norm",
    )
    wall_time = time.perf_counter() - started

    final_state = trajectory.final_state
    x = trajectory.final_x
    assert final_state is not None and x is not None
    eq = problem.stacked.W @ x - problem.d0
    fixture_name = config.problem.builtin or resolved.name
    summary = RunSummary(
        name=resolved.name,
        algorithm=algorithm.value,
        converged=trajectory.converged,
        stop_reason=trajectory.stop_reason,
        steps=trajectory.steps,
        final_time=final_state.t,
        initial_step=trajectory.step,
        final_step=trajectory.final_step,
        wall_time_s=wall_time,
        objective=objective_value(problem, x),
        eq_residual_sq=float(eq @ eq),
        kkt=kkt_residual(
            problem, x, final_state.lam, graph, config.selection or "min_norm"
        ),
        oracle_gap=_oracle_gap(fixture_name, resolved, x),
        z_mass_drift=trajectory.z_mass_drift,
        max_set_violation=trajectory.max_set_violation,
        step_changes=trajectory.step_changes,
        final_x=[float(v) for v in x],
    )

    stem = f"{resolved.name}_{algorithm.value}"
    csv_path = write_telemetry(trajectory, out_dir / f"{stem}.csv")
    text_path, json_path = write_summary(summary, out_dir, stem)
    return RunOutcome(summary, trajectory, csv_path, text_path, json_path)


def _algorithms(choice: str) -> List[Algorithm]:
    if choice == "both":
        return [Algorithm.DPOFA, Algorithm.DDFA]
    return [Algorithm(choice)]


def _log_relative_speed(outcomes: Sequence[RunOutcome]) -> None:
    by_name = {o.summary.algorithm: o.summary for o in outcomes}
    dpofa, ddfa = by_name.get("dpofa"), by_name.get("ddfa")
    if dpofa is None or ddfa is None:
        return
    if dpofa.converged and ddfa.converged:
        faster = "ddfa" if ddfa.final_time < dpofa.final_time else "dpofa"
        logger.info(
            "Stop rule met at t=%.4g (dpofa) and t=%.4g (ddfa); %s was faster",
            dpofa.final_time,
            ddfa.final_time,
            faster,
        )
    else:
        logger.info(
            "Final KKT residuals: dpofa %.3e, ddfa %.3e",
            dpofa.kkt.max_residual,
            ddfa.kkt.max_residual,
        )


async def _run_concurrently(
    config: ExperimentConfig,
    resolved: ResolvedExperiment,
    algorithms: Sequence[Algorithm],
    stop: StopRule,
    out_dir: Path,
) -> List[RunOutcome]:
    tasks = [
        asyncio.to_thread(run_single, config, resolved, alg, stop, out_dir)
        for alg in algorithms
    ]
    return list(await asyncio.gather(*tasks))


def run_experiment(
    config: ExperimentConfig, settings: Optional[Settings] = None
) -> List[RunOutcome]:
    """Run every algorithm the config asks for.

    With ``algorithm: both`` the two simulations run concurrently in
    worker threads; each writes only its own files.

    :raises EmoError: On invalid data or a numerical abort
    """
    settings = settings or get_settings()
    config = config.with_defaults(settings)
    resolved = resolve_experiment(config)

    report = validate(
        resolved.problem,
        resolved.graph,
        strict=True,
        rng=np.random.default_rng(config.seed),
    )
    for check in report.checks:
        level = logging.WARNING if check.passed is False else logging.INFO
        logger.log(level, "Assumption %s: %s", check.name, check.reason)

    stop = StopRule.from_settings(settings, tol=config.tol)
    out_dir = Path(config.output or settings.output_dir)
    algorithms = _algorithms(config.algorithm)
    if len(algorithms) == 1:
        outcomes = [
            run_single(config, resolved, algorithms[0], stop, out_dir)
        ]
    else:
        outcomes = asyncio.run(
            _run_concurrently(config, resolved, algorithms, stop, out_dir)
        )
        _log_relative_speed(outcomes)

    for outcome in outcomes:
        s = outcome.summary
        gap = "n/a" if s.oracle_gap is None else f"{s.oracle_gap:.3e}"
        logger.info(
            "%s/%s: converged=%s t=%.4g kkt=%.3e oracle_gap=%s",
            s.name,
            s.algorithm,
            s.converged,
            s.final_time,
            s.kkt.max_residual,
            gap,
        )
    return outcomes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distributed-emo",
        description="Distributed EMO solvers (DPOFA and DDFA)",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    run = subparsers.add_parser("run", help="Run an experiment")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument(
        "--builtin", help="nonsmooth10, netflow6x12 or minnorm"
    )
    source.add_argument("--config", type=Path, help="Experiment YAML file")
    run.add_argument(
        "--algorithm", choices=["dpofa", "ddfa", "both"], default=None
    )
    run.add_argument("--h", type=float, default=None, help="Euler step")
    run.add_argument("--t-end", type=float, default=None, dest="t_end")
    run.add_argument("--tol", type=float, default=None)
    run.add_argument("--out", default=None, help="Output directory")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument(
        "--sample-stride", type=int, default=None, dest="sample_stride"
    )
    run.add_argument(
        "--selection", choices=["min_norm", "oracle"], default=None
    )
    run.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        type=str.upper,
        default=None,
        dest="log_level",
    )
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is not None:
        config = load_experiment_config(args.config)
    else:
        config = ExperimentConfig.for_builtin(args.builtin)
    return config.with_overrides(
        algorithm=args.algorithm,
        h=args.h,
        t_end=args.t_end,
        tol=args.tol,
        output=args.out,
        seed=args.seed,
        sample_stride=args.sample_stride,
        selection=args.selection,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the ``distributed-emo`` command.

    :param argv: Arguments without the program name, ``sys.argv`` if None
    :return: Process exit code
    """
    # Load environment variables from .env file if it exists
    load_dotenv()

    args = build_parser().parse_args(argv)
    settings = get_settings()
    setup_logging(level=args.log_level or settings.log_level)

    try:
        config = _config_from_args(args)
        outcomes = run_experiment(config, settings)
    except (ConfigurationError, ValidationError, PreconditionError) as exc:
        logger.error("Invalid experiment: %s", exc.message)
        logger.debug("Error details: %s", exc.to_json())
        return EXIT_INVALID
    except (IntegrationError, OracleConvergenceError) as exc:
        logger.error("Run aborted: %s", exc.message)
        logger.debug("Error details: %s", exc.to_json())
        return EXIT_NUMERICAL
    except EmoError as exc:
        logger.error("Run failed: %s", exc.message)
        logger.debug("Error details: %s", exc.to_json())
        return EXIT_NUMERICAL

    if all(o.summary.converged for o in outcomes):
        return EXIT_OK
    return EXIT_NOT_CONVERGED


if __name__ == "__main__":
    raise SystemExit(main())
