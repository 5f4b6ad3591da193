"""Closed convex constraint sets with closed-form Euclidean projections.

Every set is an immutable value. Arrays handed in are copied and frozen,
so a set can be shared between concurrently running simulations.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Tuple

import numpy as np

from ..exceptions import DimensionError, ValidationError

# Half-width of the box used to sample unbounded directions
SAMPLE_RADIUS = 10.0


def _frozen(values: Iterable[float] | np.ndarray, name: str) -> np.ndarray:
    array = np.array(values, dtype=float).reshape(-1)
    if np.isnan(array).any():
        raise ValidationError(f"{name} contains NaN", field=name)
    array.setflags(write=False)
    return array


def _fmt(values: np.ndarray) -> str:
    return ",".join(repr(float(v)) for v in values)


class ConvexSet(ABC):
    """A closed convex subset of R^dim with an exact projection."""

    @property
    @abstractmethod
    def dim(self) -> int:
        """Ambient dimension."""

    @property
    def componentwise(self) -> bool:
        """True when the set is a (possibly unbounded) box."""
        return False

    @abstractmethod
    def project_array(self, u: np.ndarray) -> np.ndarray:
        """Project ``u`` without dimension checks."""

    @abstractmethod
    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        """Smallest box containing the set, with infinite entries allowed."""

    @abstractmethod
    def describe(self) -> str:
        """Canonical text used for problem fingerprints."""

    def check_dim(self, u: np.ndarray, name: str = "u") -> np.ndarray:
        array = np.asarray(u, dtype=float).reshape(-1)
        if array.shape[0] != self.dim:
            raise DimensionError(
                f"{name} has length {array.shape[0]}, set has dimension "
                f"{self.dim}",
                expected=self.dim,
                actual=array.shape[0],
            )
        return array

    def contains(self, x: np.ndarray, tol: float = 1e-12) -> bool:
        """Membership test up to ``tol`` in the infinity norm."""
        point = self.check_dim(x, "x")
        gap = np.abs(point - self.project_array(point))
        return bool(np.max(gap, initial=0.0) <= tol)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Draw ``count`` points of the set, one per row.

        Unbounded directions are sampled from ``[-SAMPLE_RADIUS,
        SAMPLE_RADIUS]``.
        """
        lo, hi = self.bounds()
        lo_ok, hi_ok = np.isfinite(lo), np.isfinite(hi)
        low = np.where(
            lo_ok, lo, np.where(hi_ok, hi - 2 * SAMPLE_RADIUS, -SAMPLE_RADIUS)
        )
        high = np.where(
            hi_ok, hi, np.where(lo_ok, lo + 2 * SAMPLE_RADIUS, SAMPLE_RADIUS)
        )
        points = rng.uniform(low, high, size=(count, self.dim))
        return np.array([self.project_array(p) for p in points]).reshape(
            count, self.dim
        )


@dataclass(frozen=True, eq=False)
class FullSpace(ConvexSet):
    """The whole space R^dim."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValidationError("dimension must be positive", field="dim")

    @property
    def dim(self) -> int:
        return self.size

    @property
    def componentwise(self) -> bool:
        return True

    def project_array(self, u: np.ndarray) -> np.ndarray:
        return np.array(u, dtype=float)

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.full(self.size, -np.inf), np.full(self.size, np.inf)

    def describe(self) -> str:
        return f"FullSpace(dim={self.size})"


@dataclass(frozen=True, eq=False)
class Interval(ConvexSet):
    """A scalar interval ``[lo, hi]``."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if np.isnan(self.lo) or np.isnan(self.hi) or self.lo > self.hi:
            raise ValidationError(
                f"Interval requires lo <= hi, got [{self.lo}, {self.hi}]",
                field="interval",
            )

    @property
    def dim(self) -> int:
        return 1

    @property
    def componentwise(self) -> bool:
        return True

    def project_array(self, u: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(u, dtype=float), self.lo, self.hi)

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.array([float(self.lo)]), np.array([float(self.hi)])

    def describe(self) -> str:
        return f"Interval(lo={float(self.lo)!r},hi={float(self.hi)!r})"


@dataclass(frozen=True, eq=False)
class Box(ConvexSet):
    """A box ``lo <= x <= hi`` with per-component bounds."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self) -> None:
        lo = _frozen(self.lo, "lo")
        hi = _frozen(self.hi, "hi")
        if lo.shape != hi.shape or lo.size == 0:
            raise DimensionError(
                "Box bounds must be non-empty and of equal length",
                expected=lo.shape,
                actual=hi.shape,
            )
        if np.any(lo > hi):
            raise ValidationError(
                "Box requires lo <= hi componentwise", field="box"
            )
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return int(self.lo.shape[0])

    @property
    def componentwise(self) -> bool:
        return True

    def project_array(self, u: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(u, dtype=float), self.lo, self.hi)

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.lo.copy(), self.hi.copy()

    def describe(self) -> str:
        return f"Box(lo={_fmt(self.lo)};hi={_fmt(self.hi)})"


@dataclass(frozen=True, eq=False)
class Ball(ConvexSet):
    """A closed Euclidean ball."""

    center: np.ndarray
    radius: float

    def __post_init__(self) -> None:
        center = _frozen(self.center, "center")
        if center.size == 0:
            raise ValidationError("Ball center must be non-empty", field="center")
        if not self.radius > 0:
            raise ValidationError(
                f"Ball radius must be positive, got {self.radius}",
                field="radius",
                value=self.radius,
            )
        object.__setattr__(self, "center", center)

    @property
    def dim(self) -> int:
        return int(self.center.shape[0])

    def project_array(self, u: np.ndarray) -> np.ndarray:
        offset = np.asarray(u, dtype=float) - self.center
        norm = float(np.linalg.norm(offset))
        if norm <= self.radius:
            return np.array(u, dtype=float)
        return self.center + (self.radius / norm) * offset

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.center - self.radius, self.center + self.radius

    def contains(self, x: np.ndarray, tol: float = 1e-12) -> bool:
        point = self.check_dim(x, "x")
        return bool(np.linalg.norm(point - self.center) <= self.radius + tol)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        directions = rng.standard_normal((count, self.dim))
        norms = np.linalg.norm(directions, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        radii = self.radius * rng.uniform(0.0, 1.0, (count, 1)) ** (
            1.0 / self.dim
        )
        return self.center + radii * directions / norms

    def describe(self) -> str:
        return f"Ball(center={_fmt(self.center)};radius={float(self.radius)!r})"


@dataclass(frozen=True, eq=False)
class Product(ConvexSet):
    """Cartesian product of sets, projected factor by factor.

    Products of componentwise factors flatten to a single clip.
    """

    factors: Tuple[ConvexSet, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        factors = tuple(self.factors)
        if not factors:
            raise ValidationError("Product needs at least one factor")
        object.__setattr__(self, "factors", factors)

    @cached_property
    def offsets(self) -> Tuple[int, ...]:
        return tuple(
            int(v) for v in np.cumsum([0] + [f.dim for f in self.factors])
        )

    @cached_property
    def _flat_bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        lo = np.concatenate([f.bounds()[0] for f in self.factors])
        hi = np.concatenate([f.bounds()[1] for f in self.factors])
        lo.setflags(write=False)
        hi.setflags(write=False)
        return lo, hi

    @property
    def dim(self) -> int:
        return self.offsets[-1]

    @cached_property
    def componentwise(self) -> bool:  # type: ignore[override]
        return all(f.componentwise for f in self.factors)

    def slices(self) -> Sequence[slice]:
        return [
            slice(self.offsets[k], self.offsets[k + 1])
            for k in range(len(self.factors))
        ]

    def project_array(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.componentwise:
            lo, hi = self._flat_bounds
            return np.clip(u, lo, hi)
        return np.concatenate(
            [f.project_array(u[s]) for f, s in zip(self.factors, self.slices())]
        )

    def contains(self, x: np.ndarray, tol: float = 1e-12) -> bool:
        point = self.check_dim(x, "x")
        return all(
            f.contains(point[s], tol)
            for f, s in zip(self.factors, self.slices())
        )

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        lo, hi = self._flat_bounds
        return lo.copy(), hi.copy()

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return np.hstack([f.sample(rng, count) for f in self.factors])

    def describe(self) -> str:
        return "Product(" + ";".join(f.describe() for f in self.factors) + ")"
