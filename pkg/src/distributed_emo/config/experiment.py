"""Experiment configuration files.

An experiment file is YAML describing the problem (a built-in name or an
inline definition), the communication graph, the algorithm and the
integration parameters. Values left out fall back to :class:`Settings`;
command-line flags override both via :meth:`ExperimentConfig.with_overrides`.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import numpy as np
import yaml
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_validator,
    model_validator,
)
from pydantic import ValidationError as PydanticValidationError

from ..exceptions import ConfigurationError
from ..problem.objectives import (
    ObjectiveOracle,
    QuadraticObjective,
    SeparableQuadraticL1,
)
from ..problem.sets import Ball, Box, ConvexSet, FullSpace, Interval, Product
from .settings import Settings

logger = logging.getLogger(__name__)

BUILTIN_PROBLEMS = ("nonsmooth10", "netflow6x12", "minnorm")
AlgorithmChoice = Literal["dpofa", "ddfa", "both"]


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ObjectiveSpec(_Spec):
    """``quadratic_l1``: ``sum a x^2 + b |x| + c x``;
    ``quadratic``: ``1/2 x^T Q x + c^T x``."""

    kind: Literal["quadratic_l1", "quadratic"] = "quadratic_l1"
    a: Optional[List[float]] = None
    b: Optional[List[float]] = None
    c: Optional[List[float]] = None
    Q: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def check_coefficients(self) -> "ObjectiveSpec":
        if self.kind == "quadratic_l1" and self.a is None:
            raise ValueError("quadratic_l1 objectives need 'a'")
        if self.kind == "quadratic" and self.Q is None:
            raise ValueError("quadratic objectives need 'Q'")
        return self

    def build(self, dim: int) -> ObjectiveOracle:
        if self.kind == "quadratic":
            c = np.zeros(dim) if self.c is None else np.asarray(self.c)
            return QuadraticObjective(np.asarray(self.Q, dtype=float), c)
        a = np.broadcast_to(np.asarray(self.a, dtype=float), (dim,))
        b = np.broadcast_to(np.asarray(self.b or [0.0], dtype=float), (dim,))
        c = np.broadcast_to(np.asarray(self.c or [0.0], dtype=float), (dim,))
        return SeparableQuadraticL1(a, b, c)


class SetSpec(_Spec):
    """Constraint set; ``product`` nests further set specs."""

    kind: Literal["interval", "box", "ball", "full", "product"]
    lo: Optional[Union[float, List[float]]] = None
    hi: Optional[Union[float, List[float]]] = None
    center: Optional[List[float]] = None
    radius: Optional[float] = None
    dim: Optional[int] = None
    factors: Optional[List["SetSpec"]] = None

    @model_validator(mode="after")
    def check_fields(self) -> "SetSpec":
        required = {
            "interval": ("lo", "hi"),
            "box": ("lo", "hi"),
            "ball": ("center", "radius"),
            "full": ("dim",),
            "product": ("factors",),
        }[self.kind]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"{self.kind} set needs {', '.join(missing)}")
        return self

    def build(self) -> ConvexSet:
        if self.kind == "interval":
            return Interval(float(self.lo), float(self.hi))  # type: ignore
        if self.kind == "box":
            return Box(np.atleast_1d(self.lo), np.atleast_1d(self.hi))
        if self.kind == "ball":
            return Ball(np.asarray(self.center), float(self.radius or 0))
        if self.kind == "full":
            return FullSpace(int(self.dim))  # type: ignore[arg-type]
        return Product(tuple(f.build() for f in self.factors or []))


class AgentSpec(_Spec):
    """One agent: objective, set and its ``m x q`` coupling block."""

    objective: ObjectiveSpec
    set: SetSpec
    w: List[List[float]]


class ProblemSpec(_Spec):
    """Either ``builtin`` or an inline ``m``/``d0``/``agents`` definition."""

    builtin: Optional[str] = None
    m: Optional[int] = None
    d0: Optional[List[float]] = None
    supply_weights: Optional[List[float]] = None
    agents: Optional[List[AgentSpec]] = None

    @field_validator("builtin")
    @classmethod
    def validate_builtin(cls, v: Optional[str]) -> Optional[str]:
        if v is not None and v not in BUILTIN_PROBLEMS:
            raise ValueError(
                f"unknown builtin '{v}', expected one of "
                f"{list(BUILTIN_PROBLEMS)}"
            )
        return v

    @model_validator(mode="after")
    def check_source(self) -> "ProblemSpec":
        inline = (self.m, self.d0, self.agents)
        if self.builtin is not None:
            if any(v is not None for v in inline):
                raise ValueError("give either 'builtin' or an inline problem")
        elif any(v is None for v in inline):
            raise ValueError("inline problems need 'm', 'd0' and 'agents'")
        return self


class GraphSpec(_Spec):
    """Built-in topology or an explicit ``[i, j, weight]`` edge list."""

    builtin: Optional[Literal["ring", "complete", "path", "line_graph"]] = None
    edges: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def check_source(self) -> "GraphSpec":
        if (self.builtin is None) == (self.edges is None):
            raise ValueError("give exactly one of 'builtin' or 'edges'")
        for edge in self.edges or []:
            if len(edge) not in (2, 3):
                raise ValueError(f"edge {edge} must be [i, j] or [i, j, w]")
        return self


class InitSpec(_Spec):
    """Initial state overrides; omitted blocks use the defaults."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    primal: Optional[List[float]] = None
    lam: Optional[List[float]] = Field(None, alias="lambda")
    z: Optional[List[float]] = None


class ExperimentConfig(_Spec):
    """One experiment: what to solve, on which graph, and how."""

    name: str = "experiment"
    problem: ProblemSpec
    graph: Optional[GraphSpec] = None
    algorithm: AlgorithmChoice = "both"
    h: Optional[float] = None
    t_end: Optional[float] = None
    tol: Optional[float] = None
    sample_stride: Optional[int] = None
    seed: int = 0
    init: InitSpec = Field(default_factory=InitSpec)
    output: Optional[str] = None
    selection: Optional[Literal["min_norm", "oracle"]] = None

    @field_validator("h", "t_end", "tol")
    @classmethod
    def validate_positive(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not (np.isfinite(v) and v > 0):
            raise ValueError("must be positive and finite")
        return v

    @field_validator("sample_stride")
    @classmethod
    def validate_stride(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError("must be at least 1")
        return v

    @field_validator("seed")
    @classmethod
    def validate_seed(cls, v: int) -> int:
        if v < 0:
            raise ValueError("must be nonnegative")
        return v

    @classmethod
    def for_builtin(cls, name: str, **values: Any) -> "ExperimentConfig":
        return _validated({"name": name, "problem": {"builtin": name}, **values})

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        """Copy with every non-None override applied and re-validated."""
        data = self.model_dump(by_alias=True)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return _validated(data)

    def with_defaults(self, settings: Settings) -> "ExperimentConfig":
        """Fill unset integration parameters from ``settings``."""
        return self.with_overrides(
            h=self.h if self.h is not None else settings.default_step,
            t_end=self.t_end if self.t_end is not None else settings.default_t_end,
            tol=self.tol if self.tol is not None else settings.default_tol,
            sample_stride=self.sample_stride or settings.sample_stride,
            selection=self.selection or settings.selection,
            output=self.output or settings.output_dir,
        )


SetSpec.model_rebuild()


def _setting_name(exc: PydanticValidationError) -> str:
    error = exc.errors()[0]
    return ".".join(str(part) for part in error["loc"]) or "config"


def _validated(data: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except PydanticValidationError as exc:
        setting = _setting_name(exc)
        raise ConfigurationError(
            f"invalid experiment setting '{setting}': "
            f"{exc.errors()[0]['msg']}",
            setting=setting,
        ) from exc


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read and validate an experiment YAML file.

    The file stem becomes the experiment name unless ``name`` is set.

    :raises ConfigurationError: If the file is unreadable, is not a YAML
        mapping, or fails validation
    """
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigurationError(
            f"cannot read experiment file {path}: {exc}", setting="config"
        ) from exc
    except yaml.YAMLError as exc:
        raise ConfigurationError(
            f"experiment file {path} is not valid YAML: {exc}",
            setting="config",
        ) from exc
    if not isinstance(data, dict):
        raise ConfigurationError(
            f"experiment file {path} must contain a mapping", setting="config"
        )
    data.setdefault("name", path.stem)
    config = _validated(data)
    logger.info("Loaded experiment '%s' from %s", config.name, path)
    return config
