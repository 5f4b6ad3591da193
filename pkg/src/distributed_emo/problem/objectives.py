"""Objective oracles: values, subgradient selections and best responses.

An oracle returns one subgradient selection ``g(x)`` per point. For
``|x|`` terms the selection is ``sign(x)`` with ``0`` at the kink, the
minimal-norm element of the subdifferential. Oracles also expose a box
enclosing the subdifferential, which the dynamics use for the min-norm
selection, and an exact ``best_response`` used by the centralized oracle.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from ..exceptions import DimensionError, ValidationError
from .sets import Ball, ConvexSet, Product

logger = logging.getLogger(__name__)

GRID_POINTS = 41
GRID_ROUNDS = 200


class ObjectiveOracle(ABC):
    """Convex objective of one agent (or of the stacked problem)."""

    @property
    @abstractmethod
    def dim(self) -> int:
        """Dimension of the decision variable."""

    @property
    @abstractmethod
    def smooth(self) -> bool:
        """True when ``subgradient`` is a Lipschitz gradient."""

    @property
    @abstractmethod
    def strictly_convex(self) -> bool:
        """Declared by the builder, never inferred."""

    @property
    def box_subdifferential(self) -> bool:
        """True when ``subdifferential`` returns the exact set as a box."""
        return self.smooth

    @abstractmethod
    def value(self, x: np.ndarray) -> float:
        """Objective value."""

    @abstractmethod
    def subgradient(self, x: np.ndarray) -> np.ndarray:
        """Single-valued subgradient selection."""

    def subdifferential(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Box ``(lo, hi)`` enclosing the subdifferential at ``x``."""
        g = self.subgradient(x)
        return g, g.copy()

    def best_response(
        self, mu: np.ndarray, constraint_set: ConvexSet
    ) -> np.ndarray:
        """Minimize ``f(x) - mu^T x`` over ``constraint_set``."""
        return numerical_best_response(self, mu, constraint_set)

    @abstractmethod
    def describe(self) -> str:
        """Canonical text used for problem fingerprints."""


def _vector(values: Sequence[float] | np.ndarray, name: str) -> np.ndarray:
    array = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(array)):
        raise ValidationError(f"{name} must be finite", field=name)
    array.setflags(write=False)
    return array


def _fmt(values: np.ndarray) -> str:
    return ",".join(repr(float(v)) for v in np.ravel(values))


@dataclass(frozen=True, eq=False)
class SeparableQuadraticL1(ObjectiveOracle):
    """``f(x) = sum_k a_k x_k^2 + b_k |x_k| + c_k x_k`` with ``a > 0``.

    :param a: Quadratic weights, strictly positive
    :param b: Absolute-value weights, nonnegative
    :param c: Linear weights
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self) -> None:
        a = _vector(self.a, "a")
        b = _vector(self.b, "b")
        c = _vector(self.c, "c")
        if not (a.shape == b.shape == c.shape) or a.size == 0:
            raise DimensionError(
                "a, b and c must be non-empty and of equal length",
                expected=a.shape,
                actual=(b.shape, c.shape),
            )
        if np.any(a <= 0):
            raise ValidationError("a must be strictly positive", field="a")
        if np.any(b < 0):
            raise ValidationError("b must be nonnegative", field="b")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @classmethod
    def uniform(
        cls, dim: int, a: float = 1.0, b: float = 0.0, c: float = 0.0
    ) -> "SeparableQuadraticL1":
        return cls(np.full(dim, a), np.full(dim, b), np.full(dim, c))

    @property
    def dim(self) -> int:
        return int(self.a.shape[0])

    @property
    def smooth(self) -> bool:
        return not bool(np.any(self.b > 0))

    @property
    def strictly_convex(self) -> bool:
        return True

    @property
    def box_subdifferential(self) -> bool:
        return True

    def value(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.sum(self.a * x * x + self.b * np.abs(x) + self.c * x))

    def subgradient(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return 2.0 * self.a * x + self.b * np.sign(x) + self.c

    def subdifferential(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        base = 2.0 * self.a * x + self.c
        sign = np.sign(x)
        kink = sign == 0
        lo = base + self.b * np.where(kink, -1.0, sign)
        hi = base + self.b * np.where(kink, 1.0, sign)
        return lo, hi

    def best_response(
        self, mu: np.ndarray, constraint_set: ConvexSet
    ) -> np.ndarray:
        if not constraint_set.componentwise:
            return numerical_best_response(self, mu, constraint_set)
        # Soft threshold, then clip: the scalar problems are separable
        r = np.asarray(mu, dtype=float) - self.c
        x = np.sign(r) * np.maximum(np.abs(r) - self.b, 0.0) / (2.0 * self.a)
        lo, hi = constraint_set.bounds()
        return np.clip(x, lo, hi)

    def describe(self) -> str:
        return (
            f"SeparableQuadraticL1(a={_fmt(self.a)};b={_fmt(self.b)};"
            f"c={_fmt(self.c)})"
        )


@dataclass(frozen=True, eq=False)
class QuadraticObjective(ObjectiveOracle):
    """``f(x) = 1/2 x^T Q x + c^T x`` with ``Q`` symmetric PSD.

    Strictly convex iff ``Q`` is positive definite.
    """

    Q: np.ndarray
    c: np.ndarray

    def __post_init__(self) -> None:
        Q = np.array(self.Q, dtype=float)
        c = _vector(self.c, "c")
        if Q.ndim != 2 or Q.shape != (c.size, c.size):
            raise DimensionError(
                "Q must be square and match c",
                expected=(c.size, c.size),
                actual=Q.shape,
            )
        if not np.allclose(Q, Q.T, atol=1e-12):
            raise ValidationError("Q must be symmetric", field="Q")
        eigenvalues = np.linalg.eigvalsh(Q)
        if eigenvalues[0] < -1e-10:
            raise ValidationError(
                "Q must be positive semidefinite",
                field="Q",
                value=float(eigenvalues[0]),
            )
        Q.setflags(write=False)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "_min_eig", float(eigenvalues[0]))

    @property
    def dim(self) -> int:
        return int(self.c.shape[0])

    @property
    def smooth(self) -> bool:
        return True

    @property
    def strictly_convex(self) -> bool:
        return self._min_eig > 1e-12  # type: ignore[attr-defined]

    def value(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float(0.5 * x @ self.Q @ x + self.c @ x)

    def subgradient(self, x: np.ndarray) -> np.ndarray:
        return self.Q @ np.asarray(x, dtype=float) + self.c

    def best_response(
        self, mu: np.ndarray, constraint_set: ConvexSet
    ) -> np.ndarray:
        lo, hi = constraint_set.bounds()
        if constraint_set.componentwise and not (
            np.isfinite(lo).any() or np.isfinite(hi).any()
        ):
            rhs = np.asarray(mu, dtype=float) - self.c
            return np.linalg.lstsq(self.Q, rhs, rcond=None)[0]
        return numerical_best_response(self, mu, constraint_set)

    def describe(self) -> str:
        return f"QuadraticObjective(Q={_fmt(self.Q)};c={_fmt(self.c)})"


@dataclass(frozen=True, eq=False)
class CallableObjective(ObjectiveOracle):
    """Wrap user-supplied value and subgradient callables.

    :param value_fn: Map from a point to the objective value
    :param subgradient_fn: Map from a point to one subgradient
    :param size: Decision dimension
    :param is_smooth: Whether ``subgradient_fn`` is a true gradient
    :param is_strictly_convex: Declared strict convexity
    :param name: Label used in fingerprints
    """

    value_fn: Callable[[np.ndarray], float]
    subgradient_fn: Callable[[np.ndarray], np.ndarray]
    size: int
    is_smooth: bool = False
    is_strictly_convex: bool = True
    name: str = "callable"

    @property
    def dim(self) -> int:
        return self.size

    @property
    def smooth(self) -> bool:
        return self.is_smooth

    @property
    def strictly_convex(self) -> bool:
        return self.is_strictly_convex

    def value(self, x: np.ndarray) -> float:
        return float(self.value_fn(np.asarray(x, dtype=float)))

    def subgradient(self, x: np.ndarray) -> np.ndarray:
        g = np.asarray(
            self.subgradient_fn(np.asarray(x, dtype=float)), dtype=float
        ).reshape(-1)
        if g.shape[0] != self.size:
            raise DimensionError(
                f"subgradient of {self.name} has wrong length",
                expected=self.size,
                actual=g.shape[0],
            )
        return g

    def describe(self) -> str:
        return f"CallableObjective(name={self.name};dim={self.size})"


@dataclass(frozen=True, eq=False)
class StackedObjective(ObjectiveOracle):
    """Sum of agent objectives over consecutive slices of one vector."""

    parts: Tuple[ObjectiveOracle, ...]

    def __post_init__(self) -> None:
        parts = tuple(self.parts)
        offsets = np.cumsum([0] + [p.dim for p in parts])
        object.__setattr__(self, "parts", parts)
        object.__setattr__(
            self,
            "_slices",
            [slice(int(s), int(e)) for s, e in zip(offsets[:-1], offsets[1:])],
        )

    @property
    def slices(self) -> List[slice]:
        return self._slices  # type: ignore[attr-defined]

    @property
    def dim(self) -> int:
        return sum(p.dim for p in self.parts)

    @property
    def smooth(self) -> bool:
        return all(p.smooth for p in self.parts)

    @property
    def strictly_convex(self) -> bool:
        return all(p.strictly_convex for p in self.parts)

    @property
    def box_subdifferential(self) -> bool:
        return all(p.box_subdifferential for p in self.parts)

    def value(self, x: np.ndarray) -> float:
        return sum(p.value(x[s]) for p, s in zip(self.parts, self.slices))

    def subgradient(self, x: np.ndarray) -> np.ndarray:
        return np.concatenate(
            [p.subgradient(x[s]) for p, s in zip(self.parts, self.slices)]
        )

    def subdifferential(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        boxes = [p.subdifferential(x[s]) for p, s in zip(self.parts, self.slices)]
        return (
            np.concatenate([lo for lo, _ in boxes]),
            np.concatenate([hi for _, hi in boxes]),
        )

    def describe(self) -> str:
        return "Stacked(" + ";".join(p.describe() for p in self.parts) + ")"


def stack_objectives(parts: Sequence[ObjectiveOracle]) -> ObjectiveOracle:
    """Combine agent objectives into one oracle on the stacked vector.

    All-``SeparableQuadraticL1`` problems collapse into a single vectorized
    instance.
    """
    if all(isinstance(p, SeparableQuadraticL1) for p in parts):
        return SeparableQuadraticL1(
            np.concatenate([p.a for p in parts]),  # type: ignore[attr-defined]
            np.concatenate([p.b for p in parts]),  # type: ignore[attr-defined]
            np.concatenate([p.c for p in parts]),  # type: ignore[attr-defined]
        )
    return StackedObjective(tuple(parts))


def grid_minimize(
    fun: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-13,
) -> float:
    """Minimize a convex scalar function on ``[lo, hi]`` by grid refinement.

    Infinite bounds are handled by growing a bracket around the current
    best point until the minimizer is interior to it.
    """
    center = float(np.clip(0.0, lo, hi))
    width = 1.0
    for _ in range(64):
        a, b = max(lo, center - width), min(hi, center + width)
        points = np.linspace(a, b, GRID_POINTS)
        k = int(np.argmin([fun(p) for p in points]))
        at_open_edge = (k == 0 and a > lo) or (k == GRID_POINTS - 1 and b < hi)
        if not at_open_edge:
            break
        center, width = float(points[k]), 2.0 * width
    for _ in range(GRID_ROUNDS):
        if b - a <= tol * (1.0 + abs(points[k])):
            break
        a = float(points[max(k - 1, 0)])
        b = float(points[min(k + 1, GRID_POINTS - 1)])
        points = np.linspace(a, b, GRID_POINTS)
        k = int(np.argmin([fun(p) for p in points]))
    return float(points[k])


def _slsqp_layout(
    constraint_set: ConvexSet, offset: int = 0
) -> Tuple[list, list]:
    """Bounds and ball constraints describing a set for SLSQP."""
    if isinstance(constraint_set, Ball):
        s = slice(offset, offset + constraint_set.dim)
        center, radius = constraint_set.center, constraint_set.radius
        ball = {
            "type": "ineq",
            "fun": lambda x: radius**2 - float(np.sum((x[s] - center) ** 2)),
            "jac": lambda x: _ball_jac(x, s, center),
        }
        return [(None, None)] * constraint_set.dim, [ball]
    if isinstance(constraint_set, Product) and not constraint_set.componentwise:
        bounds: list = []
        constraints: list = []
        for factor, start in zip(constraint_set.factors, constraint_set.offsets):
            b, c = _slsqp_layout(factor, offset + start)
            bounds.extend(b)
            constraints.extend(c)
        return bounds, constraints
    lo, hi = constraint_set.bounds()
    return [
        (None if np.isinf(l) else l, None if np.isinf(h) else h)
        for l, h in zip(lo, hi)
    ], []


def _ball_jac(x: np.ndarray, s: slice, center: np.ndarray) -> np.ndarray:
    jac = np.zeros_like(x)
    jac[s] = -2.0 * (x[s] - center)
    return jac


def numerical_best_response(
    objective: ObjectiveOracle,
    mu: np.ndarray,
    constraint_set: ConvexSet,
    x0: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Generic ``argmin_{x in set} f(x) - mu^T x``.

    Scalar problems use grid refinement, boxes use L-BFGS-B and sets with
    ball factors use SLSQP.
    """
    mu = np.asarray(mu, dtype=float)

    def shifted(x: np.ndarray) -> float:
        return objective.value(x) - float(mu @ x)

    def shifted_grad(x: np.ndarray) -> np.ndarray:
        return objective.subgradient(x) - mu

    if constraint_set.dim == 1 and constraint_set.componentwise:
        lo, hi = constraint_set.bounds()
        point = grid_minimize(
            lambda v: shifted(np.array([v])), float(lo[0]), float(hi[0])
        )
        return np.array([point])

    start = constraint_set.project_array(
        np.zeros(constraint_set.dim) if x0 is None else x0
    )
    bounds, constraints = _slsqp_layout(constraint_set)
    if constraint_set.componentwise:
        result = minimize(
            shifted,
            start,
            jac=shifted_grad,
            method="L-BFGS-B",
            bounds=bounds,
            options={"maxiter": 2000, "ftol": 1e-15, "gtol": 1e-12},
        )
    else:
        result = minimize(
            shifted,
            start,
            jac=shifted_grad,
            method="SLSQP",
            bounds=bounds,
            constraints=constraints,
            options={"maxiter": 1000, "ftol": 1e-15},
        )
    if not result.success:
        logger.debug("Best response solver stopped early: %s", result.message)
    return constraint_set.project_array(result.x)


@dataclass(frozen=True)
class ConvexityProbe:
    """Outcome of sampling the subgradient inequality and monotonicity.

    :param samples: Number of sampled pairs
    :param convexity_violations: Pairs with ``f(y) - f(x) - g(x)^T (y - x)``
        below ``-slack``
    :param worst_gap: Smallest such gap observed
    :param monotonicity_violations: Pairs with ``(g(x) - g(y))^T (x - y)``
        not strictly positive
    :param worst_monotonicity: Smallest monotonicity product observed
    """

    samples: int
    convexity_violations: int
    worst_gap: float
    monotonicity_violations: int
    worst_monotonicity: float

    @property
    def convex(self) -> bool:
        return self.convexity_violations == 0

    @property
    def strictly_monotone(self) -> bool:
        return self.monotonicity_violations == 0


def probe_convexity(
    objective: ObjectiveOracle,
    lo: np.ndarray,
    hi: np.ndarray,
    samples: int = 1000,
    rng: Optional[np.random.Generator] = None,
    slack: float = 1e-9,
) -> ConvexityProbe:
    """Sample random pairs in ``[lo, hi]`` and test convexity inequalities.

    A sanity check only: passing does not prove convexity.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (objective.dim,))
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (objective.dim,))
    xs = rng.uniform(lo, hi, size=(samples, objective.dim))
    ys = rng.uniform(lo, hi, size=(samples, objective.dim))

    gaps = np.empty(samples)
    products = np.empty(samples)
    for k in range(samples):
        x, y = xs[k], ys[k]
        gx, gy = objective.subgradient(x), objective.subgradient(y)
        gaps[k] = objective.value(y) - objective.value(x) - gx @ (y - x)
        products[k] = (gx - gy) @ (x - y)

    return ConvexityProbe(
        samples=samples,
        convexity_violations=int(np.sum(gaps < -slack)),
        worst_gap=float(gaps.min()),
        monotonicity_violations=int(np.sum(products <= 0.0)),
        worst_monotonicity=float(products.min()),
    )
