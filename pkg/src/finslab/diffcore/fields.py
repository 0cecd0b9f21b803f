"""Scalar, vector and metric fields with exact derivatives.

Fields are written once, generically: ``components`` accepts a sequence of
coordinates that may be plain floats or :class:`~finslab.diffcore.jet.Jet`
objects.  Feeding jets yields exact derivatives; feeding floats evaluates.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .jet import MAX_VARS, Jet, derivative_tensors


class DomainError(ValueError):
    """A field was evaluated outside the set where it is defined."""


def as_point(x, dim: int = 4) -> np.ndarray:
    p = np.asarray(x, dtype=float).reshape(-1)
    if p.shape != (dim,):
        raise ValueError(f"expected a point with {dim} coordinates, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"point has non-finite coordinates: {p}")
    return p


def as_point4(x) -> np.ndarray:
    return as_point(x, 4)


def _stack(entries, nvars: int, order: int, shape) -> list[np.ndarray]:
    """Turn an array of jets/constants into [value, d1, d2, ...] arrays.

    Derivative axes come first: ``out[1][k, i, j] = d_k entry[i, j]``.
    """
    flat = np.asarray(entries, dtype=object).reshape(-1)
    per = [derivative_tensors(e, nvars, order) for e in flat]
    out = []
    for k in range(order + 1):
        arr = np.array([p[k] for p in per], dtype=float)
        arr = arr.reshape(tuple(shape) + (nvars,) * k)
        # move derivative axes to the front
        nd = len(shape)
        arr = np.moveaxis(arr, list(range(nd, nd + k)), list(range(k)))
        out.append(arr)
    return out


class MetricField:
    """Symmetric positive-definite bilinear form depending on the point."""

    dim = 4

    def components(self, x) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        return np.asarray(self.components(list(x)), dtype=float)

    def derivatives(self, x, order: int) -> list[np.ndarray]:
        """[g, dg, ddg, ...] with ``dg[k, i, j] = d_k g_ij``."""
        x = as_point(x, self.dim)
        g = self.components(Jet.variables(x, order))
        return _stack(g, self.dim, order, (self.dim, self.dim))


class VectorField:
    dim = 4

    def components(self, x) -> list:
        raise NotImplementedError

    def __call__(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        return np.asarray(self.components(list(x)), dtype=float)

    def jacobian(self, x) -> np.ndarray:
        """``J[i, k] = d_k X^i``."""
        x = as_point(x, self.dim)
        X = self.components(Jet.variables(x, 1))
        _, dX = _stack(X, self.dim, 1, (self.dim,))
        return dX.T

    def __add__(self, other: VectorField) -> VectorField:
        return SumField(self, other)

    def __mul__(self, k: float) -> VectorField:
        return ScaledField(self, float(k))

    __rmul__ = __mul__


class SumField(VectorField):
    def __init__(self, first: VectorField, second: VectorField):
        self.first, self.second = first, second

    def components(self, x):
        return [p + q for p, q in zip(self.first.components(x), self.second.components(x))]


class ScaledField(VectorField):
    def __init__(self, field: VectorField, k: float):
        self.field, self.k = field, k

    def components(self, x):
        return [self.k * c for c in self.field.components(x)]


class ConstantField(VectorField):
    def __init__(self, value: Sequence[float]):
        self.value = np.asarray(value, dtype=float)
        self.dim = len(self.value)

    def components(self, x):
        return [float(v) for v in self.value]


class ZeroCovector:
    """The 1-form b = 0 (Riemannian case of a Randers metric)."""

    dim = 4

    def components(self, x):
        return [0.0] * self.dim


class FunctionMetric(MetricField):
    """Wrap a generic callable ``x -> matrix`` as a metric field."""

    def __init__(self, func: Callable, dim: int = 4):
        self.func = func
        self.dim = dim

    def components(self, x):
        return np.asarray(self.func(x), dtype=object)


class FlatMetric(MetricField):
    """The Euclidean metric g_0."""

    def __init__(self, dim: int = 4):
        self.dim = dim

    def components(self, x):
        return np.eye(self.dim).astype(object)


def differentiate(field: Callable, point, order: int) -> np.ndarray:
    """Exact derivative tensor of a scalar field at ``point``.

    ``field`` takes a list of coordinates (floats or jets) and returns a scalar.
    Up to eight variables are supported, so ``field`` may depend on x and y.
    """
    if order not in (0, 1, 2, 3):
        raise ValueError(f"order must be 0..3, got {order}")
    p = np.asarray(point, dtype=float).reshape(-1)
    if not 1 <= p.size <= MAX_VARS:
        raise ValueError(f"expected 1..{MAX_VARS} coordinates, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise DomainError(f"non-finite point {p}")
    val = field(Jet.variables(p, max(order, 1)))
    return derivative_tensors(val, p.size, max(order, 1))[order]


def _fd_tensor(field: Callable, p: np.ndarray, order: int, step: float) -> np.ndarray:
    n = p.size

    def f(q):
        return float(field(list(q)))

    if order == 0:
        return np.array(f(p))
    e = np.eye(n) * step
    if order == 1:
        return np.array([(f(p + e[i]) - f(p - e[i])) / (2 * step) for i in range(n)])
    # nested central differences; never touches the jet path
    out = np.empty((n,) * order)
    for i in range(n):
        hi = _fd_tensor(field, p + e[i], order - 1, step)
        lo = _fd_tensor(field, p - e[i], order - 1, step)
        out[i] = (hi - lo) / (2 * step)
    return out


def finite_difference_check(field: Callable, point, order: int, step: float = 1e-5) -> float:
    """Max |exact - central difference| over all derivatives of the given order."""
    if step <= 0:
        raise ValueError("step must be positive")
    p = np.asarray(point, dtype=float).reshape(-1)
    exact = differentiate(field, p, order)
    fd = _fd_tensor(field, p, order, step)
    return float(np.max(np.abs(exact - fd))) if exact.size else 0.0
