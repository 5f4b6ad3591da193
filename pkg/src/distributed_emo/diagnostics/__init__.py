"""KKT residuals, Lyapunov functions, equilibria and the reference oracle."""

from .equilibrium import Equilibrium, build_equilibrium
from .fixtures import (
    OracleFixture,
    canonical_text,
    find_fixture,
    fixture_path,
    load_fixture,
    problem_fingerprint,
    write_fixture,
)
from .kkt import equality_residual, kkt_residual, lambda_bar_of, objective_value
from .lyapunov import (
    BoundednessReport,
    LyapunovMonitor,
    boundedness_report,
    count_violations,
    lyapunov,
    lyapunov_ddfa,
    lyapunov_dpofa,
    lyapunov_trace,
)
from .oracle import (
    ORACLE_VERSION,
    OracleSolution,
    centralized_oracle,
    solve_centralized,
)

__all__ = [
    "BoundednessReport",
    "Equilibrium",
    "LyapunovMonitor",
    "ORACLE_VERSION",
    "OracleFixture",
    "OracleSolution",
    "boundedness_report",
    "build_equilibrium",
    "canonical_text",
    "centralized_oracle",
    "count_violations",
    "equality_residual",
    "find_fixture",
    "fixture_path",
    "kkt_residual",
    "lambda_bar_of",
    "load_fixture",
    "lyapunov",
    "lyapunov_ddfa",
    "lyapunov_dpofa",
    "lyapunov_trace",
    "objective_value",
    "problem_fingerprint",
    "solve_centralized",
    "write_fixture",
]
