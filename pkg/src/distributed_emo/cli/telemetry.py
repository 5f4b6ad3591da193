"""Telemetry CSV and summary report files.

Columns are ``t, f, eq_residual_sq, lambda_norm_sq, z_norm_sq`` followed by
one ``x<k>`` column per primal component. Values are written with 17
significant digits, which round-trips IEEE doubles exactly.
"""

import csv
import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from ..dynamics.state import Algorithm, Trajectory, TrajectorySample
from ..exceptions import ValidationError
from ..models.reports import RunSummary

logger = logging.getLogger(__name__)

SCALAR_COLUMNS = ("t", "f", "eq_residual_sq", "lambda_norm_sq", "z_norm_sq")
_SAMPLE_FIELDS = (
    "t",
    "f_value",
    "eq_residual_sq",
    "lambda_norm_sq",
    "z_norm_sq",
)


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def telemetry_header(dim: int) -> List[str]:
    return list(SCALAR_COLUMNS) + [f"x{k}" for k in range(dim)]


def write_telemetry(trajectory: Trajectory, path: Union[str, Path]) -> Path:
    """Write the sampled trajectory as CSV.

    The file is written to a temporary sibling and moved into place.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dim = trajectory.samples[0].x.size if trajectory.samples else 0
    temp_path = path.with_suffix(".tmp")
    with open(temp_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(telemetry_header(dim))
        for sample in trajectory.samples:
            writer.writerow(
                [_fmt(getattr(sample, name)) for name in _SAMPLE_FIELDS]
                + [_fmt(v) for v in sample.x]
            )
    temp_path.replace(path)
    logger.info("Wrote %d telemetry rows to %s", len(trajectory.samples), path)
    return path


def _algorithm_from_name(path: Path) -> Algorithm:
    for algorithm in Algorithm:
        if path.stem.endswith(f"_{algorithm.value}"):
            return algorithm
    raise ValidationError(
        f"cannot infer the algorithm from file name {path.name}",
        field="algorithm",
    )


def read_telemetry(
    path: Union[str, Path],
    algorithm: Optional[Algorithm] = None,
    step: float = float("nan"),
) -> Trajectory:
    """Load a telemetry CSV back into a :class:`Trajectory`.

    Only the sampled telemetry is restored; the final state and run
    bookkeeping are not part of the file.

    :param path: CSV written by :func:`write_telemetry`
    :param algorithm: Algorithm of the run, inferred from a ``_dpofa`` or
        ``_ddfa`` file-name suffix when omitted
    :param step: Step size to record on the trajectory
    :raises ValidationError: If the header is not a telemetry header
    """
    path = Path(path)
    algorithm = Algorithm(algorithm) if algorithm else _algorithm_from_name(path)
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    if not rows or tuple(rows[0][: len(SCALAR_COLUMNS)]) != SCALAR_COLUMNS:
        raise ValidationError(
            f"{path} does not start with a telemetry header", field="header"
        )
    dim = len(rows[0]) - len(SCALAR_COLUMNS)
    if rows[0] != telemetry_header(dim):
        raise ValidationError(f"{path} has malformed x columns", field="header")

    trajectory = Trajectory(algorithm=algorithm, step=step)
    for row in rows[1:]:
        values = [float(v) for v in row]
        t, f_value, eq_sq, lam_sq, z_sq = values[: len(SCALAR_COLUMNS)]
        trajectory.samples.append(
            TrajectorySample(
                t=t,
                x=np.array(values[len(SCALAR_COLUMNS) :]),
                f_value=f_value,
                eq_residual_sq=eq_sq,
                lambda_norm_sq=lam_sq,
                z_norm_sq=z_sq,
            )
        )
    return trajectory


def write_summary(
    summary: RunSummary, out_dir: Union[str, Path], stem: str
) -> Tuple[Path, Path]:
    """Write ``<stem>_summary.txt`` and ``<stem>_summary.json``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    text_path = out_dir / f"{stem}_summary.txt"
    json_path = out_dir / f"{stem}_summary.json"
    text_path.write_text(summary.to_text(), encoding="utf-8")
    json_path.write_text(
        summary.model_dump_json(indent=2) + "\n", encoding="utf-8"
    )
    logger.info("Wrote summary %s", text_path)
    return text_path, json_path
