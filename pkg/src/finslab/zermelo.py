"""Zermelo navigation: Randers metrics from a Riemannian sea g and a wind V.

With V_i = g_ij V^j and lambda = 1 - |V|_g^2 the Randers data are

    a_ij = g_ij / lambda + V_i V_j / lambda^2,    b_i = -V_i / lambda.

The closed-form wind norms for V_r and U_s are kept here as
cross-check targets only; every domain test used to build metrics contracts
V against g directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .diffcore import MetricField, VectorField, ZeroCovector, as_point4, invert_sym4, sqrt
from .diffcore.jet import value_of


class WindTooStrong(ValueError):
    """|V|_g >= 1: the navigation data do not define a Randers metric here."""


class InvalidRanders(ValueError):
    """|b|_a >= 1 or the Riemannian part is not positive-definite."""


@dataclass(frozen=True)
class NavigationData:
    g: MetricField
    V: VectorField


@dataclass(frozen=True)
class RandersMetric:
    """F = alpha + beta with alpha^2 = a_ij y^i y^j and beta = b_i y^i.

    ``beta`` is any object with a generic ``components(x)`` returning b_i.
    """

    alpha: MetricField
    beta: object = ZeroCovector()

    def forms(self, x):
        return self.alpha.components(x), self.beta.components(x)

    def F2(self, x, y):
        """F^2 as a generic expression in (x, y); floats or jets."""
        a, b = self.forms(x)
        alpha2 = sum(a[i][j] * y[i] * y[j] for i in range(4) for j in range(4))
        F = sqrt(alpha2) + sum(b[i] * y[i] for i in range(4))
        return F * F


def _wind_parts(g, V):
    """Lowered wind, |V|^2 and lambda for generic entries."""
    Vl = [sum(g[i][j] * V[j] for j in range(4)) for i in range(4)]
    n2 = sum(Vl[i] * V[i] for i in range(4))
    return Vl, n2, 1.0 - n2


class _NavigationAlpha(MetricField):
    def __init__(self, nav: NavigationData):
        self.nav = nav

    def components(self, x):
        return _navigation_forms(self.nav, x)[0]


class _NavigationBeta:
    def __init__(self, nav: NavigationData):
        self.nav = nav

    def components(self, x):
        return _navigation_forms(self.nav, x)[1]


def _navigation_forms(nav: NavigationData, x):
    g = nav.g.components(x)
    V = nav.V.components(x)
    Vl, n2, lam = _wind_parts(g, V)
    if value_of(n2) >= 1.0:
        raise WindTooStrong(f"|V|_g^2 = {value_of(n2):.6g} >= 1 at x = {[value_of(c) for c in x]}")
    inv = 1.0 / lam
    inv2 = inv * inv
    a = np.empty((4, 4), dtype=object)
    for i in range(4):
        for j in range(i, 4):
            a[i, j] = a[j, i] = g[i][j] * inv + Vl[i] * Vl[j] * inv2
    b = [-Vl[i] * inv for i in range(4)]
    return a, b


class NavigationRanders(RandersMetric):
    """Randers metric induced by navigation data, evaluated in one pass per point."""

    def __init__(self, nav: NavigationData):
        object.__setattr__(self, "nav", nav)
        object.__setattr__(self, "alpha", _NavigationAlpha(nav))
        object.__setattr__(self, "beta", _NavigationBeta(nav))

    def forms(self, x):
        return _navigation_forms(self.nav, x)


def randers_from_navigation(nav: NavigationData) -> NavigationRanders:
    return NavigationRanders(nav)


# -- pointwise conversions ----------------------------------------------------


def navigation_to_randers(nav: NavigationData, x) -> tuple[np.ndarray, np.ndarray]:
    x = as_point4(x)
    a, b = _navigation_forms(nav, list(x))
    return np.asarray(a, float), np.asarray(b, float)


def randers_to_navigation(randers: RandersMetric, x) -> tuple[np.ndarray, np.ndarray]:
    """Inverse map: g = eps (a - b b), V = -a^{-1} b / eps, eps = 1 - |b|_a^2."""
    x = as_point4(x)
    a, b = randers.forms(list(x))
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    try:
        ainv = invert_sym4(a)
    except np.linalg.LinAlgError as exc:
        raise InvalidRanders(str(exc)) from exc
    b_up = ainv @ b
    nb2 = float(b @ b_up)
    if nb2 >= 1.0:
        raise InvalidRanders(f"|b|_a^2 = {nb2:.6g} >= 1")
    eps = 1.0 - nb2
    g = eps * (a - np.outer(b, b))
    return 0.5 * (g + g.T), -b_up / eps


def randers_value(randers: RandersMetric, x, y) -> float:
    y = np.asarray(y, float)
    if not np.any(y):
        raise ValueError("F is evaluated on nonzero tangent vectors only")
    a, b = randers.forms(list(as_point4(x)))
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    return float(np.sqrt(y @ a @ y) + b @ y)


def wind_norm_direct(nav: NavigationData, x) -> float:
    """|V|_g^2 = V^i g_ij V^j."""
    x = as_point4(x)
    V = nav.V(x)
    return float(V @ nav.g(x) @ V)


# -- closed forms under test --------------------------------------------------


def wind_norm_closed_Vr(a: float, r: float, x) -> float:
    x = as_point4(x)
    r2 = float(x @ x)
    return r * r * r2 / (a * r2 + 1.0)


def wind_norm_closed_Us(a: float, s: float, x) -> float:
    x1, x2, x3, x4 = as_point4(x)
    r2 = x1**2 + x2**2 + x3**2 + x4**2
    mu = 1.0 / (a * r2 + 1.0)
    prod = x1 * x2 * x3 * x4
    norm4 = x1**4 + x2**4 + x3**4 + x4**4
    norm6 = x1**6 + x2**6 + x3**6 + x4**6
    f = (
        -(a**2) * (x1**2 * x4**4 + x2**4 * x3**2 + x2**2 * x3**4 + x1**4 * x4**2)
        + 3 * a**2 * (
            x1**2 * x2**4 + x4**2 * x2**4 + x1**2 * x3**4 + x3**2 * x4**4
            + x3**4 * x4**2 + x1**4 * x2**2 + x2**2 * x4**4 + x3**2 * x1**4
        )
        + 4 * a * (
            x1**2 * x3**2 - x2**2 * x3**2 + x2**2 * x1**2
            + x4**2 * x3**2 - x4**2 * x1**2 + x4**2 * x2**2
        )
        + 2 * a**2 * (
            x1**2 * x3**2 * x4**2 + x2**2 * x3**2 * x4**2
            + x1**2 * x2**2 * x3**2 + x1**2 * x2**2 * x4**2
        )
    )
    braces = (1 + 8 * a**2 * prod) * r2 + 2 * a * norm4 + a**2 * norm6 + 16 * a * prod + f
    return mu * s * s * braces


# -- domains ------------------------------------------------------------------


@dataclass(frozen=True)
class DomainSpec:
    kind: Literal["ball-radius", "whole-space", "implicit-norm"]
    radius: float | None = None

    def __post_init__(self):
        if self.kind not in ("ball-radius", "whole-space", "implicit-norm"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "ball-radius" and not (self.radius is not None and 0 < self.radius < np.inf):
            raise ValueError("ball-radius domains need a finite positive radius")


def vr_closed_form_domain(a: float, r: float) -> DomainSpec:
    """The ball |x| < 1/sqrt(r^2 - a) when r^2 > a, else all of R^4."""
    if r * r > a:
        return DomainSpec("ball-radius", 1.0 / np.sqrt(r * r - a))
    return DomainSpec("whole-space")


def domain_contains(spec: DomainSpec, nav: NavigationData | None, x, bound: float = 1.0) -> bool:
    x = as_point4(x)
    if spec.kind == "whole-space":
        return True
    if spec.kind == "ball-radius":
        return bool(np.linalg.norm(x) < spec.radius)
    if nav is None:
        raise ValueError("implicit-norm domains need navigation data")
    return wind_norm_direct(nav, x) < bound
