"""Small dense linear algebra: 4x4 symmetric inverses and kernels."""

from __future__ import annotations

import numpy as np

from .jet import value_of


class SingularMatrixError(np.linalg.LinAlgError):
    pass


def as_sym4(m, check_pd: bool = False) -> np.ndarray:
    """Validate a symmetric 4x4 form; optionally require positive-definiteness."""
    m = np.asarray(m, dtype=float)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {m.shape}")
    if not np.array_equal(m, m.T):
        raise ValueError("matrix is not exactly symmetric")
    if check_pd:
        minors = [np.linalg.det(m[:k, :k]) for k in range(1, 5)]
        if min(minors) <= 0:
            raise ValueError(f"matrix is not positive-definite (leading minors {minors})")
    return m


def invert_sym4(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {m.shape}")
    ev = np.abs(np.linalg.eigvalsh(0.5 * (m + m.T)))
    if ev.min() < 1e-12 * ev.max() or ev.max() == 0.0:
        raise SingularMatrixError(f"matrix is numerically singular (eigenvalues {ev})")
    inv = np.linalg.solve(m, np.eye(4))
    return 0.5 * (inv + inv.T)


def nullspace(system, tolerance: float = 1e-9, atol: float = 0.0) -> np.ndarray:
    """Orthonormal kernel basis, one vector per row.

    A singular value counts as zero when it is <= ``tolerance * s_max`` or
    <= ``atol``.  An all-zero system has the full space as kernel.
    """
    a = np.atleast_2d(np.asarray(system, dtype=float))
    if max(a.shape) > 64:
        raise ValueError(f"system too large for the dense kernel routine: {a.shape}")
    n = a.shape[1]
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    sv = np.zeros(n)
    sv[: s.size] = s
    cut = max(tolerance * (s.max() if s.size else 0.0), atol)
    null = sv <= cut
    return vt[null]


def invert_generic(m) -> np.ndarray:
    """Gauss-Jordan inverse of a square matrix whose entries may be jets."""
    rows = [list(r) for r in m]
    n = len(rows)
    aug = [r + [1.0 if i == j else 0.0 for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(value_of(aug[r][col])))
        if value_of(aug[piv][col]) == 0.0:
            raise SingularMatrixError("singular matrix in generic inverse")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv_p = 1.0 / aug[col][col]
        aug[col] = [e * inv_p for e in aug[col]]
        for r in range(n):
            if r != col:
                f = aug[r][col]
                aug[r] = [e - p * f for e, p in zip(aug[r], aug[col])]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = aug[i][n + j]
    return out
