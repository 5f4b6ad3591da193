"""Problem data model: sets, objective oracles and the EMO problem."""

from .model import (
    AgentProblem,
    EmoProblem,
    StackedForm,
    slater_margin,
    split_supply,
    stack,
    validate,
)
from .objectives import (
    CallableObjective,
    ConvexityProbe,
    ObjectiveOracle,
    QuadraticObjective,
    SeparableQuadraticL1,
    StackedObjective,
    probe_convexity,
    stack_objectives,
)
from .sets import Ball, Box, ConvexSet, FullSpace, Interval, Product

__all__ = [
    "AgentProblem",
    "Ball",
    "Box",
    "CallableObjective",
    "ConvexSet",
    "ConvexityProbe",
    "EmoProblem",
    "FullSpace",
    "Interval",
    "ObjectiveOracle",
    "Product",
    "QuadraticObjective",
    "SeparableQuadraticL1",
    "StackedForm",
    "StackedObjective",
    "probe_convexity",
    "slater_margin",
    "split_supply",
    "stack",
    "stack_objectives",
    "validate",
]
