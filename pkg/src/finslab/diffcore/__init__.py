from .fields import (
    ConstantField,
    DomainError,
    FlatMetric,
    FunctionMetric,
    MetricField,
    VectorField,
    ZeroCovector,
    as_point,
    as_point4,
    differentiate,
    finite_difference_check,
)
from .jet import Jet, sqrt, value_of
from .linalg import SingularMatrixError, as_sym4, invert_generic, invert_sym4, nullspace

__all__ = [
    "ConstantField",
    "DomainError",
    "FlatMetric",
    "FunctionMetric",
    "Jet",
    "MetricField",
    "SingularMatrixError",
    "VectorField",
    "ZeroCovector",
    "as_point",
    "as_point4",
    "as_sym4",
    "differentiate",
    "finite_difference_check",
    "invert_generic",
    "invert_sym4",
    "nullspace",
    "sqrt",
    "value_of",
]
