"""Riemannian metrics on R^4 and their curvature.

Contains the Hawking Taub-NUT family g_a, the Gibbons-Hawking ansatz over a
flat 3-dimensional chart, Levi-Civita curvature from exact metric derivatives,
and Lie derivatives of metrics along vector fields.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .diffcore import (
    DomainError,
    Jet,
    MetricField,
    VectorField,
    as_point,
    invert_sym4,
)
from .diffcore.fields import _stack

DEFAULT_SAMPLES = 100
DEFAULT_RADIUS = 2.0


class DegenerateError(ValueError):
    """Metric or plane is degenerate where a nondegenerate one is required."""


# -- sampling -----------------------------------------------------------------


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator; same seed gives the same stream on every platform."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def sample_ball(rng: np.random.Generator, n: int, radius: float = DEFAULT_RADIUS, dim: int = 4) -> np.ndarray:
    """``n`` points uniform in the Euclidean ball of the given radius."""
    d = rng.standard_normal((n, dim))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = radius * rng.random(n) ** (1.0 / dim)
    return d * r[:, None]


# -- the Taub-NUT family ------------------------------------------------------


def hopf_form(x) -> list:
    """Components of omega = -x2 dx1 + x1 dx2 - x4 dx3 + x3 dx4."""
    x1, x2, x3, x4 = x
    return [-x2, x1, -x4, x3]


class TaubNutMetric(MetricField):
    """Hawking Taub-NUT metric g_a on R^4 (a >= 0; a = 0 is the flat metric).

    ``components`` uses the explicit matrix form in B = a|x|^2 + 1 and
    A = a(1 + 1/B); ``closed_form`` evaluates B g_0 - a(a|x|^2 + 2)/B omega^2
    and exists for cross-checking only.
    """

    def __init__(self, a: float):
        if a < 0:
            raise ValueError(f"Taub-NUT parameter must be nonnegative, got {a}")
        self.a = float(a)

    def __repr__(self) -> str:
        return f"TaubNutMetric(a={self.a})"

    def B(self, x):
        x1, x2, x3, x4 = x
        return self.a * (x1 * x1 + x2 * x2 + x3 * x3 + x4 * x4) + 1.0

    def components(self, x):
        x1, x2, x3, x4 = x
        B = self.B(x)
        A = self.a * (1.0 + 1.0 / B)
        return np.array(
            [
                [B - A * x2 * x2, A * x1 * x2, -A * x2 * x4, A * x2 * x3],
                [A * x1 * x2, B - A * x1 * x1, A * x1 * x4, -A * x1 * x3],
                [-A * x2 * x4, A * x1 * x4, B - A * x4 * x4, A * x3 * x4],
                [A * x2 * x3, -A * x1 * x3, A * x3 * x4, B - A * x3 * x3],
            ],
            dtype=object,
        )

    def closed_form(self, x) -> np.ndarray:
        x = as_point(x)
        r2 = float(x @ x)
        B = self.a * r2 + 1.0
        w = np.array(hopf_form(x))
        return B * np.eye(4) - self.a * (self.a * r2 + 2.0) / B * np.outer(w, w)


# -- Gibbons-Hawking ansatz ---------------------------------------------------


@dataclass(frozen=True)
class GibbonsHawkingData:
    """Potential ``u`` and 1-form ``A`` on an axis-aligned box in R^3.

    ``u`` maps a 3-point (floats or jets) to a scalar, ``A`` to 3 components.
    """

    u: Callable
    A: Callable
    lo: tuple[float, float, float]
    hi: tuple[float, float, float]

    def __post_init__(self):
        lo, hi = np.asarray(self.lo, float), np.asarray(self.hi, float)
        if lo.shape != (3,) or hi.shape != (3,) or np.any(lo >= hi):
            raise ValueError(f"chart must be a nonempty 3-box, got lo={self.lo} hi={self.hi}")
        probes = np.stack(np.meshgrid(*[(l, 0.5 * (l + h), h) for l, h in zip(lo, hi)]), -1).reshape(-1, 3)
        for p in probes:
            if not float(self.u(list(p))) > 0.0:
                raise ValueError(f"potential u must be positive on the chart; u{tuple(p)} <= 0")

    def contains(self, p) -> bool:
        p = np.asarray(p, float)
        return bool(np.all(p >= self.lo) and np.all(p <= self.hi))

    def check(self, p) -> None:
        if not self.contains([float(c) for c in p]):
            raise DomainError(f"point {p} is outside the chart {self.lo}..{self.hi}")


class GibbonsHawkingMetric(MetricField):
    """u h + u^{-1} (dt + A)^2 in coordinates (t, p1, p2, p3), h flat."""

    def __init__(self, data: GibbonsHawkingData):
        self.data = data

    def components(self, x):
        t, *p = x
        self.data.check(p)
        u = self.data.u(p)
        A = list(self.data.A(p))
        inv = 1.0 / u
        g = np.empty((4, 4), dtype=object)
        g[0, 0] = inv
        for i in range(3):
            g[0, i + 1] = g[i + 1, 0] = A[i] * inv
            for j in range(3):
                g[i + 1, j + 1] = A[i] * A[j] * inv + (u if i == j else 0.0)
        return g


def gibbons_hawking_metric(data: GibbonsHawkingData) -> GibbonsHawkingMetric:
    return GibbonsHawkingMetric(data)


def monopole_residual(data: GibbonsHawkingData, p) -> float:
    """Max-abs of du - *dA at ``p``; *dA is the curl of A in flat R^3."""
    p = as_point(p, 3)
    data.check(p)
    P = Jet.variables(p, 1)
    du = _stack([data.u(P)], 3, 1, (1,))[1][:, 0]
    dA = _stack(list(data.A(P)), 3, 1, (3,))[1]  # dA[k, i] = d_k A_i
    curl = np.array([dA[1, 2] - dA[2, 1], dA[2, 0] - dA[0, 2], dA[0, 1] - dA[1, 0]])
    return float(np.max(np.abs(du - curl)))


# -- Levi-Civita curvature ----------------------------------------------------


def _inverse(g: np.ndarray) -> np.ndarray:
    try:
        return invert_sym4(g) if g.shape == (4, 4) else np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise DegenerateError(str(exc)) from exc


def _connection(metric: MetricField, x, order: int):
    x = as_point(x, metric.dim)
    ders = metric.derivatives(x, order)
    g, dg = ders[0], ders[1]
    ginv = _inverse(g)
    # T[l, j, k] = d_j g_lk + d_k g_lj - d_l g_jk
    T = np.einsum("jlk->ljk", dg) + np.einsum("klj->ljk", dg) - dg
    gamma = 0.5 * np.einsum("il,ljk->ijk", ginv, T)
    if order == 1:
        return g, ginv, gamma, None
    ddg = ders[2]
    dT = np.einsum("mjlk->mljk", ddg) + np.einsum("mklj->mljk", ddg) - ddg
    dginv = -np.einsum("ip,mpq,ql->mil", ginv, dg, ginv)
    dgamma = 0.5 * (np.einsum("mil,ljk->mijk", dginv, T) + np.einsum("il,mljk->mijk", ginv, dT))
    return g, ginv, gamma, dgamma


def christoffel(metric: MetricField, x) -> np.ndarray:
    """Gamma[i, j, k] = Gamma^i_{jk}."""
    return _connection(metric, x, 1)[2]


def riemann_tensor(metric: MetricField, x) -> np.ndarray:
    """R[i, j, k, l] = R^i_{jkl}, with R(d_k, d_l) d_j = R^i_{jkl} d_i."""
    _, _, G, dG = _connection(metric, x, 2)
    return (
        np.einsum("kilj->ijkl", dG)
        - np.einsum("likj->ijkl", dG)
        + np.einsum("ikm,mlj->ijkl", G, G)
        - np.einsum("ilm,mkj->ijkl", G, G)
    )


def ricci_from_riemann(R: np.ndarray) -> np.ndarray:
    Ric = np.einsum("kjkl->jl", R)
    return 0.5 * (Ric + Ric.T)


def ricci(metric: MetricField, x) -> np.ndarray:
    return ricci_from_riemann(riemann_tensor(metric, x))


@dataclass(frozen=True)
class CurvatureReport:
    point: np.ndarray
    ricci: np.ndarray
    ricci_max_abs: float
    riemann_max_abs: float


def curvature_report(metric: MetricField, x) -> CurvatureReport:
    R = riemann_tensor(metric, x)
    Ric = ricci_from_riemann(R)
    return CurvatureReport(
        point=as_point(x, metric.dim),
        ricci=Ric,
        ricci_max_abs=float(np.max(np.abs(Ric))),
        riemann_max_abs=float(np.max(np.abs(R))),
    )


def sectional_curvature(metric: MetricField, x, u, v) -> float:
    """g(R(u, v)v, u) / (g(u,u) g(v,v) - g(u,v)^2)."""
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    g = metric(x)
    gram = (u @ g @ u) * (v @ g @ v) - (u @ g @ v) ** 2
    if gram < 1e-12:
        raise DegenerateError(f"plane spanned by {u} and {v} is degenerate (Gram {gram:.3g})")
    R = riemann_tensor(metric, x)
    num = np.einsum("im,ijkl,j,k,l,m->", g, R, v, u, v, u)
    return float(num / gram)


# -- Lie derivatives, Killing and homothetic fields ---------------------------


def lie_derivative_metric(X: VectorField, metric: MetricField, x) -> np.ndarray:
    """(L_X g)_ij = X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k."""
    x = as_point(x, metric.dim)
    g, dg = metric.derivatives(x, 1)
    J = X.jacobian(x)
    L = np.einsum("k,kij->ij", X(x), dg) + np.einsum("kj,ki->ij", g, J) + np.einsum("ik,kj->ij", g, J)
    return 0.5 * (L + L.T)


def _require_sample(sample) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(sample, float))
    if pts.shape[0] == 0 or pts.size == 0:
        raise ValueError("sample must contain at least one point")
    return pts


def killing_residual(X: VectorField, metric: MetricField, sample: Sequence) -> float:
    pts = _require_sample(sample)
    return max(float(np.max(np.abs(lie_derivative_metric(X, metric, p)))) for p in pts)


def homothety_constant(X: VectorField, metric: MetricField, sample: Sequence) -> tuple[float, float]:
    """Least-squares c in L_X g = -4c g, and the max-abs misfit of that model."""
    pts = _require_sample(sample)
    Ls = [lie_derivative_metric(X, metric, p) for p in pts]
    gs = [metric(p) for p in pts]
    num = sum(float(np.sum(L * g)) for L, g in zip(Ls, gs))
    den = sum(float(np.sum(g * g)) for g in gs)
    c = -num / (4.0 * den)
    resid = max(float(np.max(np.abs(L + 4.0 * c * g))) for L, g in zip(Ls, gs))
    return c, resid
