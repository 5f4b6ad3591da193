#!/usr/bin/env python3
"""Regenerate the committed oracle fixtures of the built-in problems.

Usage::

    python scripts/generate_fixtures.py [--out DIR] [--tol 1e-10]
"""

import argparse
import logging
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from distributed_emo.config.settings import get_settings  # noqa: E402
from distributed_emo.diagnostics.fixtures import (  # noqa: E402
    FIXTURE_DIR,
    write_fixture,
)
from distributed_emo.diagnostics.oracle import solve_centralized  # noqa: E402
from distributed_emo.exceptions import EmoError  # noqa: E402
from distributed_emo.experiments.builtins import (  # noqa: E402
    builtin_netflow,
    builtin_nonsmooth10,
)
from distributed_emo.utils.log_config import setup_logging  # noqa: E402

logger = logging.getLogger("generate_fixtures")


def main() -> int:
    settings = get_settings()
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=FIXTURE_DIR)
    parser.add_argument("--tol", type=float, default=settings.oracle_tol)
    parser.add_argument(
        "--max-iter", type=int, default=settings.oracle_max_iter
    )
    args = parser.parse_args()
    setup_logging(settings.log_level)

    problems = {
        "nonsmooth10": builtin_nonsmooth10()[0],
        "netflow6x12": builtin_netflow(),
    }
    for name, problem in problems.items():
        try:
            solution = solve_centralized(
                problem, tol=args.tol, max_iter=args.max_iter
            )
        except EmoError as exc:
            logger.error("Oracle failed on %s: %s", name, exc.message)
            return 1
        write_fixture(
            args.out / f"{name}.txt",
            name,
            problem,
            solution.x_star,
            solution.lambda_bar,
            args.tol,
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
