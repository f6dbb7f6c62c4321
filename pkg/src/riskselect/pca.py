"""Minimized quadratic reconstruction risk per candidate rank.

For data rows ``x_i`` the rank-``k`` hypothesis projects onto a
``k``-dimensional subspace; the minimized empirical reconstruction risk
equals ``trace(S) - sum of the k largest eigenvalues of S`` where ``S``
is the uncentered second-moment matrix ``(1/n) sum x_i x_i'``.  The
spectrum makes the minimization exact, so no iterative fitting is
involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import SymMatrix, jacobi_eigen
from .selection import RiskProfile

PSD_TOL = 1e-9


@dataclass(frozen=True)
class SecondMoment:
    """Uncentered sample second-moment matrix with its sample count."""

    matrix: SymMatrix
    n: int
    trace: float


def second_moment(data: np.ndarray) -> SecondMoment:
    """``(1/n) sum_i x_i x_i'``, uncentered."""
    x = np.atleast_2d(np.asarray(data, dtype=float))
    n = x.shape[0]
    if n < 1:
        raise ValueError("need at least one data row")
    m = x.T @ x / n
    sym = SymMatrix((m + m.T) / 2.0)
    return SecondMoment(matrix=sym, n=n, trace=float(np.trace(sym.entries)))


def rank_risk_profile(sm: SecondMoment, m_max: int) -> RiskProfile:
    """Minimized reconstruction risks for ranks ``k = 1..m_max``.

    ``min_risks[k-1] = trace - (lambda_1 + ... + lambda_k)`` with the
    eigenvalues sorted descending; values are clipped below at zero.
    """
    dim = sm.matrix.dim
    if not 1 <= m_max <= dim:
        raise ValueError(f"m_max={m_max} outside 1..{dim}")
    eig = jacobi_eigen(sm.matrix)
    if eig.values[-1] < -PSD_TOL * max(sm.trace, 1.0):
        raise ValueError(
            f"second moment is not positive semidefinite: min eigenvalue {eig.values[-1]:.3e}"
        )
    risks = sm.trace - np.cumsum(eig.values[:m_max])
    return RiskProfile(min_risks=np.maximum(risks, 0.0), n=sm.n)


def pca_penalty_constants(m_max: int, ambient: int) -> list[float]:
    """Complexity constants ``c_k = k * ambient`` for ranks ``k = 1..m_max``."""
    if m_max < 1 or ambient < m_max:
        raise ValueError(f"need 1 <= m_max <= ambient, got {m_max}, {ambient}")
    return [float(k * ambient) for k in range(1, m_max + 1)]
