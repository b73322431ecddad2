"""Eigenvalue lists of normal states and finite-dimensional checks of the
interaction inequality."""

from .eigenlist import (
    CertifiedPrefix,
    EigenvalueList,
    direct_sum,
    equal_by_moments,
    l1_distance,
    l1_distance_certified,
    list_from_values,
    moment,
    tensor,
    tensor_square_equality_implies_equality,
    tensor_top_k,
    uniform,
)
from .densop import DensityOperator, eigenlist_of, trace_norm_distance

__version__ = "0.1.0"

__all__ = [
    "CertifiedPrefix",
    "DensityOperator",
    "EigenvalueList",
    "direct_sum",
    "eigenlist_of",
    "equal_by_moments",
    "l1_distance",
    "l1_distance_certified",
    "list_from_values",
    "moment",
    "tensor",
    "tensor_square_equality_implies_equality",
    "tensor_top_k",
    "trace_norm_distance",
    "uniform",
]
