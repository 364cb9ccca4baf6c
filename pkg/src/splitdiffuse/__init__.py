"""Uniform grid placement of low-dimensional point clouds (split-diffuse),
topology-error metrics, Monte Carlo benchmarks and topic-grid analytics."""

from ._kernels import BACKEND
from .core import (
    GREEDY,
    ITERATIVE,
    DimensionMismatchError,
    GridAssignment,
    LayoutMismatchError,
    NonFiniteCoordinateError,
    PointCloud,
    SplitStrategy,
    ValidationError,
    choose_split_dimension,
    place,
    sort_key,
    split_diffuse,
    suggest_layout,
)
from .metrics import ErrorReport, check_bound, evaluate
from .samplers import SamplerSpec, sample_gaussian, sample_uniform

__all__ = [
    "BACKEND", "GREEDY", "ITERATIVE", "DimensionMismatchError", "GridAssignment", "LayoutMismatchError",
    "NonFiniteCoordinateError", "PointCloud", "SplitStrategy", "ValidationError", "choose_split_dimension",
    "place", "sort_key", "split_diffuse", "suggest_layout", "ErrorReport", "check_bound", "evaluate",
    "SamplerSpec", "sample_gaussian", "sample_uniform",
]
