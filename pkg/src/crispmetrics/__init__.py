"""Crisp binary-classification performance measures, their properties, and
measure-driven threshold, boundary and ranking analysis."""

from .core import ConfusionMatrix, InputError, Record, ScoredDataset, build_confusion, expand_labels
from .measures import (
    REGISTRY,
    CostParams,
    Direction,
    MeasureDescriptor,
    MeasureId,
    MetricValue,
    ParameterError,
    UndefinedReason,
    UnknownMeasureError,
    evaluate,
    evaluate_all,
    resolve,
)

__all__ = [
    "ConfusionMatrix", "InputError", "Record", "ScoredDataset", "build_confusion", "expand_labels",
    "REGISTRY", "CostParams", "Direction", "MeasureDescriptor", "MeasureId", "MetricValue",
    "ParameterError", "UndefinedReason", "UnknownMeasureError", "evaluate", "evaluate_all", "resolve",
]
__version__ = "0.1.0"
