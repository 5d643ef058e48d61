"""Solvers for knapsack problems with improvable item weights."""

from .model import (
    CONTINUOUS,
    DISCRETE,
    Evaluation,
    ImprovementLevel,
    Instance,
    InvariantError,
    Item,
    ModelError,
    ParseError,
    Solution,
    VariantError,
    evaluate,
    parse_instance,
    preprocess,
    serialize_instance,
    validate,
)
from .report import RunReport

__all__ = [
    "CONTINUOUS",
    "DISCRETE",
    "Evaluation",
    "ImprovementLevel",
    "Instance",
    "InvariantError",
    "Item",
    "ModelError",
    "ParseError",
    "RunReport",
    "Solution",
    "VariantError",
    "evaluate",
    "parse_instance",
    "preprocess",
    "serialize_instance",
    "validate",
]

__version__ = "0.1.0"
