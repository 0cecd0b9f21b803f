"""Truncated multivariate Taylor arithmetic.

A :class:`Jet` holds the Taylor coefficients of a scalar function around a
point, in a fixed set of ``nvars`` independent variables, up to total degree
``order``.  Arithmetic on jets is exact up to that degree, so every partial
derivative of order <= ``order`` comes out at machine precision.

Monomials are stored in graded order (all degree-0 terms, then degree-1, ...),
so a jet of order ``k`` is a prefix of the same jet at order ``k + 1``.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

MAX_VARS = 8
MAX_ORDER = 4


def _monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        alpha = [0] * nvars
        for v in combo:
            alpha[v] += 1
        out.append(tuple(alpha))
    return out


class _Basis:
    """Index tables shared by every jet with the same (nvars, order)."""

    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        mons = []
        for d in range(order + 1):
            mons.extend(_monomials(nvars, d))
        self.monomials = mons
        self.size = len(mons)
        self.index = {m: i for i, m in enumerate(mons)}
        self.degree = np.array([sum(m) for m in mons])
        self.factorial = np.array(
            [math.prod(math.factorial(e) for e in m) for m in mons], dtype=float
        )

        ii, jj, kk = [], [], []
        for i, mi in enumerate(mons):
            for j, mj in enumerate(mons):
                if self.degree[i] + self.degree[j] > order:
                    continue
                ii.append(i)
                jj.append(j)
                kk.append(self.index[tuple(p + q for p, q in zip(mi, mj))])
        self.mul_i = np.array(ii, dtype=np.intp)
        self.mul_j = np.array(jj, dtype=np.intp)
        self.mul_k = np.array(kk, dtype=np.intp)

    @property
    def lower(self) -> _Basis:
        return basis(self.nvars, self.order - 1)

    @lru_cache(maxsize=None)
    def shift(self, var: int) -> tuple[np.ndarray, np.ndarray]:
        """Source indices and multipliers for d/d(var), landing in order-1 basis."""
        low = self.lower
        src = np.empty(low.size, dtype=np.intp)
        mult = np.empty(low.size)
        for t, m in enumerate(low.monomials):
            up = list(m)
            up[var] += 1
            src[t] = self.index[tuple(up)]
            mult[t] = up[var]
        return src, mult

    @lru_cache(maxsize=None)
    def tensor_map(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Flat monomial index and alpha! for every k-fold index tuple."""
        idx = []
        for tup in itertools.product(range(self.nvars), repeat=k):
            alpha = [0] * self.nvars
            for v in tup:
                alpha[v] += 1
            idx.append(self.index[tuple(alpha)])
        idx = np.array(idx, dtype=np.intp)
        return idx, self.factorial[idx]


@lru_cache(maxsize=None)
def basis(nvars: int, order: int) -> _Basis:
    if not 1 <= nvars <= MAX_VARS:
        raise ValueError(f"jets support 1..{MAX_VARS} variables, got {nvars}")
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"jets support order 0..{MAX_ORDER}, got {order}")
    return _Basis(nvars, order)


class Jet:
    """Scalar truncated Taylor polynomial.

    Coefficients are stored per monomial, so ``coeffs[idx(alpha)]`` equals
    ``d^alpha f / alpha!``.
    """

    __slots__ = ("coeffs", "basis")
    # numpy must defer to our reflected operators
    __array_ufunc__ = None

    def __init__(self, coeffs: np.ndarray, nvars: int, order: int):
        self.basis = basis(nvars, order)
        self.coeffs = coeffs

    # -- construction -------------------------------------------------------

    @classmethod
    def constant(cls, value: float, nvars: int, order: int) -> Jet:
        b = basis(nvars, order)
        c = np.zeros(b.size)
        c[0] = value
        return cls(c, nvars, order)

    @classmethod
    def variable(cls, value: float, var: int, nvars: int, order: int) -> Jet:
        b = basis(nvars, order)
        c = np.zeros(b.size)
        c[0] = value
        if order >= 1:
            c[1 + var] = 1.0
        return cls(c, nvars, order)

    @classmethod
    def variables(cls, point, order: int) -> list[Jet]:
        point = [float(p) for p in point]
        n = len(point)
        return [cls.variable(p, i, n, order) for i, p in enumerate(point)]

    # -- inspection ---------------------------------------------------------

    @property
    def nvars(self) -> int:
        return self.basis.nvars

    @property
    def order(self) -> int:
        return self.basis.order

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        return f"Jet(value={self.value!r}, nvars={self.nvars}, order={self.order})"

    def tensor(self, k: int) -> np.ndarray:
        """Symmetric array of all k-th partial derivatives."""
        if k > self.order:
            raise ValueError(f"jet of order {self.order} has no order-{k} derivatives")
        if k == 0:
            return np.array(self.value)
        idx, fact = self.basis.tensor_map(k)
        return (self.coeffs[idx] * fact).reshape((self.nvars,) * k)

    def gradient(self) -> np.ndarray:
        return self.tensor(1)

    def hessian(self) -> np.ndarray:
        return self.tensor(2)

    def third(self) -> np.ndarray:
        return self.tensor(3)

    def truncate(self, order: int) -> Jet:
        if order == self.order:
            return self
        if order > self.order:
            raise ValueError("cannot raise the order of a jet")
        b = basis(self.nvars, order)
        return Jet(self.coeffs[: b.size].copy(), self.nvars, order)

    def diff(self, var: int) -> Jet:
        """Partial derivative as a jet of one lower order (still exact)."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        src, mult = self.basis.shift(var)
        return Jet(self.coeffs[src] * mult, self.nvars, self.order - 1)

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _check_scalar(other):
        if isinstance(other, np.ndarray) and other.ndim:
            raise TypeError("jets combine with scalars only; map over arrays explicitly")

    def _pair(self, other: Jet) -> tuple[np.ndarray, np.ndarray, int]:
        if other.nvars != self.nvars:
            raise ValueError("jets over different variable sets cannot be combined")
        order = min(self.order, other.order)
        n = basis(self.nvars, order).size
        return self.coeffs[:n], other.coeffs[:n], order

    def __add__(self, other):
        self._check_scalar(other)
        if isinstance(other, Jet):
            a, b, order = self._pair(other)
            return Jet(a + b, self.nvars, order)
        c = self.coeffs.copy()
        c[0] += other
        return Jet(c, self.nvars, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs, self.nvars, self.order)

    def __pos__(self):
        return self

    def __sub__(self, other):
        self._check_scalar(other)
        if isinstance(other, Jet):
            a, b, order = self._pair(other)
            return Jet(a - b, self.nvars, order)
        c = self.coeffs.copy()
        c[0] -= other
        return Jet(c, self.nvars, self.order)

    def __rsub__(self, other):
        self._check_scalar(other)
        c = -self.coeffs
        c[0] += other
        return Jet(c, self.nvars, self.order)

    def __mul__(self, other):
        self._check_scalar(other)
        if isinstance(other, Jet):
            a, b, order = self._pair(other)
            bs = basis(self.nvars, order)
            c = np.bincount(bs.mul_k, weights=a[bs.mul_i] * b[bs.mul_j], minlength=bs.size)
            return Jet(c, self.nvars, order)
        return Jet(self.coeffs * other, self.nvars, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        self._check_scalar(other)
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.coeffs / other, self.nvars, self.order)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, int) and p >= 0:
            out = Jet.constant(1.0, self.nvars, self.order)
            for _ in range(p):
                out = out * self
            return out
        return self.power(float(p))

    # -- elementary functions -----------------------------------------------

    def compose(self, derivs) -> Jet:
        """Apply a univariate f given [f(v), f'(v), ..., f^(order)(v)] at v = self.value."""
        h = self - self.value
        out = Jet.constant(derivs[0], self.nvars, self.order)
        term = None
        for k in range(1, self.order + 1):
            term = h if term is None else term * h
            out = out + term * (derivs[k] / math.factorial(k))
        return out

    def power(self, p: float) -> Jet:
        v = self.value
        if v <= 0.0 and p != int(p):
            raise ValueError(f"non-integer power of non-positive value {v}")
        if v == 0.0:
            raise ZeroDivisionError("power expansion around zero")
        derivs = []
        coef = 1.0
        for k in range(self.order + 1):
            derivs.append(coef * v ** (p - k))
            coef *= p - k
        return self.compose(derivs)

    def reciprocal(self) -> Jet:
        v = self.value
        if v == 0.0:
            raise ZeroDivisionError("jet division by a value of zero")
        derivs = [(-1) ** k * math.factorial(k) / v ** (k + 1) for k in range(self.order + 1)]
        return self.compose(derivs)

    def sqrt(self) -> Jet:
        if self.value <= 0.0:
            raise ValueError(f"sqrt of non-positive jet value {self.value}")
        return self.power(0.5)

    def exp(self) -> Jet:
        e = math.exp(self.value)
        return self.compose([e] * (self.order + 1))

    def log(self) -> Jet:
        v = self.value
        if v <= 0.0:
            raise ValueError(f"log of non-positive jet value {v}")
        derivs = [math.log(v)] + [
            (-1) ** (k - 1) * math.factorial(k - 1) / v**k for k in range(1, self.order + 1)
        ]
        return self.compose(derivs)


def sqrt(v):
    """sqrt for floats and jets alike."""
    if isinstance(v, Jet):
        return v.sqrt()
    return math.sqrt(v)


def value_of(v) -> float:
    return v.value if isinstance(v, Jet) else float(v)


def derivative_tensors(v, nvars: int, order: int) -> list[np.ndarray]:
    """[value, gradient, hessian, ...] of a jet or a plain constant."""
    if isinstance(v, Jet):
        return [v.tensor(k) for k in range(order + 1)]
    return [np.array(float(v))] + [np.zeros((nvars,) * k) for k in range(1, order + 1)]
