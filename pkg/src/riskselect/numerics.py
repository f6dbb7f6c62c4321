"""Dense symmetric linear algebra for small matrices (d <= ~10).

Provides a cyclic-by-rows Jacobi eigendecomposition and an unpivoted
Cholesky factorization.  Jacobi was chosen over QR iteration because it
is the simplest provably convergent symmetric eigensolver and every
consumer in this package works at single-digit dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class SymMatrix:
    """Dense symmetric matrix, symmetrized on ingest.

    Construction fails if the input deviates from symmetry by more than
    ``SYMMETRY_TOL`` in any entry.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
        if asym > SYMMETRY_TOL:
            raise ValueError(f"matrix asymmetric beyond tolerance: {asym:.3e}")
        object.__setattr__(self, "entries", (a + a.T) / 2.0)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending with matching orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray


class JacobiConvergenceError(RuntimeError):
    """Jacobi sweeps hit the cap; carries the residual off-diagonal norm."""

    def __init__(self, off_diag_norm: float) -> None:
        super().__init__(
            f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps; "
            f"max off-diagonal magnitude {off_diag_norm:.3e}"
        )
        self.off_diag_norm = off_diag_norm


def _max_off_diag(a: np.ndarray) -> float:
    if a.shape[0] == 1:
        return 0.0
    mask = ~np.eye(a.shape[0], dtype=bool)
    return float(np.max(np.abs(a[mask])))


def jacobi_eigen(m: SymMatrix) -> EigenDecomposition:
    """Full spectrum of a symmetric matrix by cyclic Jacobi rotations.

    Converged when the largest off-diagonal magnitude drops below
    ``1e-12 * (1 + max |diagonal|)``; raises
    :class:`JacobiConvergenceError` after ``JACOBI_MAX_SWEEPS`` sweeps.
    """
    a = m.entries.copy()
    d = m.dim
    v = np.eye(d)

    def converged() -> bool:
        return _max_off_diag(a) <= 1e-12 * (1.0 + float(np.max(np.abs(np.diag(a)))))

    sweeps = 0
    while not converged():
        if sweeps >= JACOBI_MAX_SWEEPS:
            raise JacobiConvergenceError(_max_off_diag(a))
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                # Stable rotation angle: t = tan(theta) is the smaller
                # root of t^2 + 2t*tau - 1 = 0.
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c

                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, q] = 0.0
                a[q, p] = 0.0

                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
        sweeps += 1

    order = np.argsort(-np.diag(a), kind="stable")
    return EigenDecomposition(values=np.diag(a)[order].copy(), vectors=v[:, order].copy())


class NotPositiveDefiniteError(RuntimeError):
    """Cholesky hit a non-positive pivot; carries the pivot index."""

    def __init__(self, pivot_index: int, pivot: float) -> None:
        super().__init__(
            f"matrix not positive definite: pivot {pivot:.3e} at index {pivot_index}"
        )
        self.pivot_index = pivot_index


def cholesky(m: SymMatrix) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T`` equal to the input."""
    a = m.entries
    d = m.dim
    lower = np.zeros((d, d))
    for j in range(d):
        pivot = a[j, j] - float(lower[j, :j] @ lower[j, :j])
        if pivot <= 0.0:
            raise NotPositiveDefiniteError(j, pivot)
        lower[j, j] = math.sqrt(pivot)
        if j + 1 < d:
            lower[j + 1 :, j] = (a[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / lower[j, j]
    return lower
