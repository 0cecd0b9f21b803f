"""Affine Killing fields of R^4 and the Taub-NUT isometry family.

Every Killing field of the flat metric is X = Q x + C with Q antisymmetric.
For g_a (a > 0) exactly the fields with C = 0 and Q of the form

    [[ 0,  m,  s,  r],
     [-m,  0, -r,  s],
     [-s,  r,  0,  n],
     [-r, -s, -n,  0]]

survive.  ``classify_killing`` recovers that family numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .diffcore import Jet, MetricField, VectorField, as_point4, nullspace
from .diffcore.fields import _stack
from .riemann import hopf_form, lie_derivative_metric, make_rng, sample_ball

# coefficient layout of the 10-parameter (Q, C) family
Q_SLOTS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
N_COEFFS = 10


class UnderdeterminedSampling(ValueError):
    """Sample points do not pin down the Killing system."""


@dataclass(frozen=True)
class EuclideanKilling(VectorField):
    """X^i(x) = Q^i_j x^j + C^i with Q antisymmetric."""

    Q: np.ndarray
    C: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def __post_init__(self):
        Q = np.asarray(self.Q, float)
        C = np.asarray(self.C, float)
        if Q.shape != (4, 4) or C.shape != (4,):
            raise ValueError("Q must be 4x4 and C a 4-vector")
        if not np.array_equal(Q, -Q.T):
            raise ValueError("Q must be exactly antisymmetric")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "C", C)

    def components(self, x):
        return [sum(self.Q[i, j] * x[j] for j in range(4)) + self.C[i] for i in range(4)]

    def coefficients(self) -> np.ndarray:
        return np.array([self.Q[i, j] for i, j in Q_SLOTS] + list(self.C))

    @classmethod
    def from_coefficients(cls, coeffs) -> EuclideanKilling:
        coeffs = np.asarray(coeffs, float)
        Q = np.zeros((4, 4))
        for value, (i, j) in zip(coeffs[:6], Q_SLOTS):
            Q[i, j] = value
            Q[j, i] = -value
        return cls(Q, coeffs[6:].copy())


class Dilation(VectorField):
    """kappa x^i d_i; homothetic for the flat metric with L_X g_0 = 2 kappa g_0."""

    def __init__(self, kappa: float = 1.0):
        self.kappa = float(kappa)

    def components(self, x):
        return [self.kappa * c for c in x]


@dataclass(frozen=True)
class TaubNutKillingParams:
    m: float = 0.0
    n: float = 0.0
    r: float = 0.0
    s: float = 0.0

    def matrix(self) -> np.ndarray:
        m, n, r, s = self.m, self.n, self.r, self.s
        return np.array(
            [
                [0.0, m, s, r],
                [-m, 0.0, -r, s],
                [-s, r, 0.0, n],
                [-r, -s, -n, 0.0],
            ]
        )


def build_field(params: TaubNutKillingParams) -> EuclideanKilling:
    return EuclideanKilling(params.matrix())


def V_r(r: float) -> EuclideanKilling:
    return build_field(TaubNutKillingParams(r=r))


def U_s(s: float) -> EuclideanKilling:
    return build_field(TaubNutKillingParams(s=s))


def W_mn(m: float, n: float) -> EuclideanKilling:
    return build_field(TaubNutKillingParams(m=m, n=n))


def hopf_dual_field(scale: float = 1.0) -> EuclideanKilling:
    """Flat-metric dual of omega: scale * (-x2, x1, -x4, x3)."""
    return W_mn(-scale, -scale)


def pattern_basis() -> np.ndarray:
    """Orthonormal rows spanning the (m, n, r, s) family in coefficient space."""
    rows = [
        build_field(TaubNutKillingParams(**{k: 1.0})).coefficients()
        for k in ("m", "n", "r", "s")
    ]
    q, _ = np.linalg.qr(np.array(rows).T)
    return q.T


def pattern_residual(vectors) -> float:
    """Largest norm of the component of any vector outside the pattern space."""
    P = pattern_basis()
    v = np.atleast_2d(np.asarray(vectors, float))
    if v.size == 0:
        return 0.0
    off = v - (v @ P.T) @ P
    return float(np.max(np.linalg.norm(off, axis=1)))


# -- Lie derivative of the Hopf form ------------------------------------------


def lie_derivative_oneform(X: VectorField, x) -> np.ndarray:
    """(L_X omega)_i = X^k d_k omega_i + omega_k d_i X^k."""
    x = as_point4(x)
    P = Jet.variables(x, 1)
    w, dw = _stack(hopf_form(P), 4, 1, (4,))  # dw[k, i] = d_k omega_i
    return np.einsum("k,ki->i", X(x), dw) + np.einsum("k,ki->i", w, X.jacobian(x))


def hopf_pde_system(X: VectorField, x) -> np.ndarray:
    """Left-hand sides of the four PDEs equivalent to L_X omega = 0, written out term by term."""
    x1, x2, x3, x4 = as_point4(x)
    X1, X2, X3, X4 = X(x)
    J = X.jacobian(x)  # J[i, k] = d_k X^i

    def d(i, k):
        return J[i - 1, k - 1]

    return np.array(
        [
            -X2 - x2 * d(1, 1) + x1 * d(2, 1) - x4 * d(3, 1) + x3 * d(4, 1),
            -x2 * d(1, 2) + X1 + x1 * d(2, 2) - x4 * d(3, 2) + x3 * d(4, 2),
            -x2 * d(1, 3) + x1 * d(2, 3) - X4 - x4 * d(3, 3) + x3 * d(4, 3),
            -x2 * d(1, 4) + x1 * d(2, 4) - x4 * d(3, 4) + X3 + x3 * d(4, 4),
        ]
    )


# -- classification -----------------------------------------------------------

_UPPER = np.triu_indices(4)


def killing_system(metric: MetricField, sample: Sequence) -> np.ndarray:
    """Rows: independent entries of L_X g at each point; columns: the 10 (Q, C) coefficients."""
    pts = np.atleast_2d(np.asarray(sample, float))
    unit = [EuclideanKilling.from_coefficients(e) for e in np.eye(N_COEFFS)]
    blocks = []
    for p in pts:
        cols = [lie_derivative_metric(X, metric, p)[_UPPER] for X in unit]
        blocks.append(np.array(cols).T)
    return np.vstack(blocks)


@dataclass(frozen=True)
class KillingClassification:
    basis: np.ndarray  # orthonormal rows in coefficient space
    pattern_residual: float
    n_points: int
    seed: int

    @property
    def dimension(self) -> int:
        return int(self.basis.shape[0])


def _kernel(metric, pts, tolerance, atol):
    A = killing_system(metric, pts)
    # R of a QR factorisation has the singular values of A in a 10x10 block
    R = np.linalg.qr(A, mode="r")
    return nullspace(R, tolerance=tolerance, atol=atol)


def classify_killing(
    metric: MetricField,
    sample: Sequence | None = None,
    *,
    seed: int = 0,
    n_points: int = 20,
    tolerance: float = 1e-9,
    atol: float = 1e-12,
    max_points: int = 100,
) -> KillingClassification:
    """Solve L_X g = 0 over the affine family X = Q x + C.

    Each kernel vector is validated on fresh seeded check points; if any fails,
    the sample is enlarged (up to ``max_points``) before giving up.
    """
    rng = make_rng(seed)
    pts = sample_ball(rng, n_points) if sample is None else np.atleast_2d(np.asarray(sample, float))
    if pts.shape[0] < N_COEFFS:
        raise UnderdeterminedSampling(
            f"{pts.shape[0]} sample point(s) cannot determine {N_COEFFS} Killing coefficients"
        )
    checks = sample_ball(rng, 5)
    while True:
        basis = _kernel(metric, pts, tolerance, atol)
        worst = 0.0
        for v in basis:
            X = EuclideanKilling.from_coefficients(v)
            for p in checks:
                worst = max(worst, float(np.max(np.abs(lie_derivative_metric(X, metric, p)))))
        if worst <= max(tolerance * 10, atol):
            return KillingClassification(basis, pattern_residual(basis), pts.shape[0], seed)
        if pts.shape[0] >= max_points:
            raise UnderdeterminedSampling(
                f"kernel of dimension {basis.shape[0]} fails off-sample (residual {worst:.3g}) "
                f"with {pts.shape[0]} points"
            )
        pts = np.vstack([pts, sample_ball(rng, min(pts.shape[0], max_points - pts.shape[0]))])
