"""Finsler curvature of Randers metrics.

Everything is derived from F^2(x, y).  The spray

    G^i = 1/4 g^{il} ( [F^2]_{x^k y^l} y^k - [F^2]_{x^l} )

needs second derivatives of F^2, and the Riemann endomorphism

    R^i_k = 2 dG^i/dx^k - y^j d2G^i/dx^j dy^k + 2 G^j d2G^i/dy^j dy^k
            - dG^i/dy^j dG^j/dy^k

needs second derivatives of G, so F^2 is expanded once as an order-4 jet in
the eight variables (x, y) and G is carried as an exact order-2 jet.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .diffcore import Jet, as_point4, invert_generic
from .riemann import homothety_constant, ricci, sample_ball
from .zermelo import NavigationData, RandersMetric, wind_norm_direct

DOMAIN_MARGIN = 0.95


class DegenerateFlag(ValueError):
    pass


class EmptyDomain(ValueError):
    """No sampled point satisfies the wind-norm margin."""


def _flagpole(y) -> np.ndarray:
    y = np.asarray(y, float).reshape(-1)
    if y.shape != (4,):
        raise ValueError(f"expected a 4-vector, got shape {y.shape}")
    if not np.any(y):
        raise ValueError("flagpole y must be nonzero")
    return y


@dataclass(frozen=True)
class Flag:
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", as_point4(self.x))
        object.__setattr__(self, "y", _flagpole(self.y))
        u = np.asarray(self.u, float).reshape(-1)
        if u.shape != (4,) or not np.all(np.isfinite(u)):
            raise ValueError("transverse edge must be a finite 4-vector")
        object.__setattr__(self, "u", u)


# -- jets of F^2 and the spray ------------------------------------------------


def _spray_jets(F: RandersMetric, x, y, order: int):
    """(G^i as order-`order` jets in (x, y), F^2 as an order-(order+2) jet)."""
    Z = Jet.variables(np.concatenate([x, y]), order + 2)
    P = F.F2(Z[:4], Z[4:])
    Py = [P.diff(4 + l) for l in range(4)]
    g = [[0.5 * Py[i].diff(4 + j) for j in range(4)] for i in range(4)]
    ginv = invert_generic(g)
    w = [sum(Py[l].diff(k) * Z[4 + k] for k in range(4)) - P.diff(l) for l in range(4)]
    G = [0.25 * sum(ginv[i, l] * w[l] for l in range(4)) for i in range(4)]
    return G, P


@dataclass(frozen=True)
class FinslerPoint:
    """Curvature data of F at a single (x, y)."""

    x: np.ndarray
    y: np.ndarray
    F2: float
    gy: np.ndarray
    spray: np.ndarray
    R: np.ndarray

    @property
    def ricci(self) -> float:
        return float(np.trace(self.R))

    def flag_curvature(self, u) -> float:
        u = np.asarray(u, float)
        g, y = self.gy, self.y
        yy, uu, uy = y @ g @ y, u @ g @ u, u @ g @ y
        den = yy * uu - uy * uy
        if not den >= 1e-12 * yy * uu or uu == 0.0:
            raise DegenerateFlag(f"flag spanned by y={y} and u={u} is degenerate")
        return float((self.R @ u) @ g @ u / den)


def curvature_at(F: RandersMetric, x, y) -> FinslerPoint:
    x = as_point4(x)
    y = _flagpole(y)
    G, P = _spray_jets(F, x, y, 2)
    grads = np.array([Gi.gradient() for Gi in G])  # [i, 8]
    hess = np.array([Gi.hessian() for Gi in G])  # [i, 8, 8]
    Gv = np.array([Gi.value for Gi in G])
    Gx, Gy = grads[:, :4], grads[:, 4:]
    Gxy = hess[:, :4, 4:]
    Gyy = hess[:, 4:, 4:]
    R = (
        2.0 * Gx
        - np.einsum("j,ijk->ik", y, Gxy)
        + 2.0 * np.einsum("j,ijk->ik", Gv, Gyy)
        - Gy @ Gy
    )
    gy = 0.5 * P.hessian()[4:, 4:]
    return FinslerPoint(x=x, y=y, F2=P.value, gy=0.5 * (gy + gy.T), spray=Gv, R=R)


def fundamental_tensor(F: RandersMetric, x, y) -> np.ndarray:
    """g_y = 1/2 Hessian of F^2 in y."""
    x = as_point4(x)
    y = _flagpole(y)
    P = F.F2(list(x), Jet.variables(y, 2))
    h = 0.5 * P.hessian()
    return 0.5 * (h + h.T)


def spray_coefficients(F: RandersMetric, x, y) -> np.ndarray:
    G, _ = _spray_jets(F, as_point4(x), _flagpole(y), 0)
    return np.array([Gi.value for Gi in G])


def riemann_endomorphism(F: RandersMetric, x, y) -> np.ndarray:
    return curvature_at(F, x, y).R


def flag_curvature(F: RandersMetric, flag: Flag) -> float:
    return curvature_at(F, flag.x, flag.y).flag_curvature(flag.u)


def finsler_ricci(F: RandersMetric, x, y) -> float:
    return curvature_at(F, x, y).ricci


# -- sampling -----------------------------------------------------------------


def admissible_points(
    nav: NavigationData,
    rng: np.random.Generator,
    n: int,
    radius: float = 2.0,
    margin: float = DOMAIN_MARGIN,
    max_draws: int | None = None,
) -> np.ndarray:
    """Seeded points of the ball with direct wind norm |V|_g^2 < margin."""
    max_draws = 200 * n if max_draws is None else max_draws
    out = []
    drawn = 0
    while len(out) < n and drawn < max_draws:
        batch = sample_ball(rng, min(64, max_draws - drawn), radius)
        drawn += batch.shape[0]
        for p in batch:
            if wind_norm_direct(nav, p) < margin:
                out.append(p)
                if len(out) == n:
                    break
    if len(out) < n:
        raise EmptyDomain(
            f"only {len(out)} of {n} points with |V|_g^2 < {margin} after {drawn} draws"
        )
    return np.array(out)


def _unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(4)
    return v / np.linalg.norm(v)


def sample_pairs(nav: NavigationData, rng: np.random.Generator, n: int, **kw) -> list[tuple[np.ndarray, np.ndarray]]:
    xs = admissible_points(nav, rng, n, **kw)
    return [(x, _unit(rng)) for x in xs]


def sample_flags(nav: NavigationData, rng: np.random.Generator, n: int, **kw) -> list[Flag]:
    xs = admissible_points(nav, rng, n, **kw)
    flags = []
    for x in xs:
        y = _unit(rng)
        u = _unit(rng)
        while abs(u @ y) > 0.99:
            u = _unit(rng)
        flags.append(Flag(x, y, u))
    return flags


# -- Einstein verification ----------------------------------------------------


@dataclass(frozen=True)
class EinsteinReport:
    points: list = field(repr=False)
    ricci_values: np.ndarray = field(repr=False)
    predicted: np.ndarray = field(repr=False)
    F2_values: np.ndarray = field(repr=False)
    max_residual: float
    max_relative_residual: float
    K: float
    c: float
    homothety_residual: float
    base_einstein_constant: float
    base_einstein_residual: float
    K_fit: float
    K_pointwise_spread: float


def einstein_check(F: RandersMetric, nav: NavigationData, sample: Sequence) -> EinsteinReport:
    """Compare Ric(x, y) with 3 K F^2, K predicted from the navigation data.

    c comes from L_V g = -4c g; the sea metric's Einstein constant lambda
    (Ric_g = lambda g) then fixes K = lambda / 3 - c^2.
    """
    pairs = [(as_point4(x), _flagpole(y)) for x, y in sample]
    if not pairs:
        raise ValueError("einstein_check needs at least one (x, y) pair")
    xs = np.array([p[0] for p in pairs])
    for x in xs:
        if wind_norm_direct(nav, x) >= 1.0:
            raise EmptyDomain(f"sample point {x} lies outside the Randers domain")
    c, hres = homothety_constant(nav.V, nav.g, xs)

    rics = [ricci(nav.g, x) for x in xs]
    gs = [nav.g(x) for x in xs]
    lam = sum(float(np.sum(R * g)) for R, g in zip(rics, gs)) / sum(float(np.sum(g * g)) for g in gs)
    base_res = max(float(np.max(np.abs(R - lam * g))) for R, g in zip(rics, gs))
    K = lam / 3.0 - c * c

    ric = np.empty(len(pairs))
    F2 = np.empty(len(pairs))
    for t, (x, y) in enumerate(pairs):
        pt = curvature_at(F, x, y)
        ric[t] = pt.ricci
        F2[t] = pt.F2
    predicted = 3.0 * K * F2
    resid = np.abs(ric - predicted)
    K_pts = ric / (3.0 * F2)
    return EinsteinReport(
        points=pairs,
        ricci_values=ric,
        predicted=predicted,
        F2_values=F2,
        max_residual=float(resid.max()),
        max_relative_residual=float(np.max(resid / F2)),
        K=float(K),
        c=float(c),
        homothety_residual=float(hres),
        base_einstein_constant=float(lam),
        base_einstein_residual=float(base_res),
        K_fit=float(np.sum(ric * F2) / (3.0 * np.sum(F2 * F2))),
        K_pointwise_spread=float(K_pts.max() - K_pts.min()),
    )


def constancy_scan(F: RandersMetric, flags: Sequence[Flag]) -> tuple[float, float, float]:
    """(min K, max K, spread) over the nondegenerate flags."""
    if len(flags) < 1:
        raise ValueError("constancy_scan needs flags")
    values = []
    for fl in flags:
        try:
            values.append(flag_curvature(F, fl))
        except DegenerateFlag:
            continue
    if not values:
        raise DegenerateFlag("every flag in the scan is degenerate")
    lo, hi = min(values), max(values)
    return lo, hi, hi - lo


def scan_values(F: RandersMetric, flags: Sequence[Flag]) -> list[float | None]:
    """Flag curvature per flag, ``None`` where the flag is degenerate."""
    out = []
    for fl in flags:
        try:
            out.append(flag_curvature(F, fl))
        except DegenerateFlag:
            out.append(None)
    return out
