"""Oracle fixture files: committed reference optima of the built-ins.

Format::

    # distributed-emo oracle fixture
    # problem: nonsmooth10
    # problem_hash: <sha256 of the canonical problem text>
    # tolerance: 1e-10
    # oracle_version: 1
    x_star 0.875 0.3125 ...
    lambda_bar 1.625 1.125
"""

import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from ..exceptions import FixtureError
from ..problem.model import EmoProblem
from .oracle import ORACLE_VERSION

logger = logging.getLogger(__name__)

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "experiments" / "fixtures"
FIXTURE_MAGIC = "# distributed-emo oracle fixture"
FINGERPRINT_VERSION = "emo-problem/1"


@dataclass(frozen=True)
class OracleFixture:
    """Parsed fixture file."""

    name: str
    problem_hash: str
    tolerance: float
    oracle_version: int
    x_star: np.ndarray
    lambda_bar: np.ndarray

    def matches(self, problem: EmoProblem) -> bool:
        return self.problem_hash == problem_fingerprint(problem)


def _fmt(values: np.ndarray) -> str:
    return ",".join(repr(float(v)) for v in np.ravel(values))


def canonical_text(problem: EmoProblem) -> str:
    """Text rendering hashed by :func:`problem_fingerprint`.

    Covers ``m``, ``d0`` and each agent's dimension, set, objective and
    ``W_i`` (row-major). Supply shares are excluded: the optimum does not
    depend on how ``d0`` is split.
    """
    lines = [FINGERPRINT_VERSION, f"m={problem.m}", f"d0={_fmt(problem.d0)}"]
    for index, agent in enumerate(problem.agents):
        lines.extend(
            [
                f"agent={index}",
                f"dim={agent.dim}",
                f"set={agent.constraint_set.describe()}",
                f"objective={agent.objective.describe()}",
                f"w={_fmt(agent.w_block)}",
            ]
        )
    return "\n".join(lines)


def problem_fingerprint(problem: EmoProblem) -> str:
    """SHA-256 hex digest of :func:`canonical_text`."""
    return hashlib.sha256(canonical_text(problem).encode("utf-8")).hexdigest()


def fixture_path(name: str) -> Path:
    return FIXTURE_DIR / f"{name}.txt"


def write_fixture(
    path: Union[str, Path],
    name: str,
    problem: EmoProblem,
    x_star: np.ndarray,
    lambda_bar: np.ndarray,
    tol: float,
) -> Path:
    """Write a fixture file and return its path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        FIXTURE_MAGIC,
        f"# problem: {name}",
        f"# problem_hash: {problem_fingerprint(problem)}",
        f"# tolerance: {tol!r}",
        f"# oracle_version: {ORACLE_VERSION}",
        "x_star " + " ".join(repr(float(v)) for v in np.ravel(x_star)),
        "lambda_bar " + " ".join(repr(float(v)) for v in np.ravel(lambda_bar)),
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info("Wrote oracle fixture %s", path)
    return path


def load_fixture(path: Union[str, Path]) -> OracleFixture:
    """Parse a fixture file.

    :raises FixtureError: If the file is missing or malformed
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FixtureError(f"cannot read fixture: {exc}", str(path)) from exc

    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != FIXTURE_MAGIC:
        raise FixtureError("missing fixture header", str(path))
    header: Dict[str, str] = {}
    vectors: Dict[str, List[float]] = {}
    try:
        for line in lines[1:]:
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                header[key.strip()] = value.strip()
            else:
                key, *values = line.split()
                vectors[key] = [float(v) for v in values]
        return OracleFixture(
            name=header["problem"],
            problem_hash=header["problem_hash"],
            tolerance=float(header["tolerance"]),
            oracle_version=int(header["oracle_version"]),
            x_star=np.array(vectors["x_star"]),
            lambda_bar=np.array(vectors["lambda_bar"]),
        )
    except (KeyError, ValueError) as exc:
        raise FixtureError(f"malformed fixture: {exc}", str(path)) from exc


def find_fixture(name: str, problem: EmoProblem) -> Optional[OracleFixture]:
    """Committed fixture for ``name`` if it exists and matches ``problem``."""
    path = fixture_path(name)
    if not path.exists():
        return None
    fixture = load_fixture(path)
    if not fixture.matches(problem):
        logger.warning(
            "Fixture %s does not match the problem being solved; ignoring it",
            path,
        )
        return None
    return fixture
