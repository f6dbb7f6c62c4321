"""The penalized-risk selection rule.

Given per-hypothesis minimized empirical risks ``r_1, ..., r_m`` and a
penalty family, the selected index is the smallest minimizer of
``r_k + P(k, n)``.  Ties are resolved by exact floating-point equality
to the smallest index; no tolerance is applied.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .penalty import PenaltySpec, penalty_value


@dataclass(frozen=True)
class RiskProfile:
    """Minimized empirical risk per hypothesis index, plus the sample size."""

    min_risks: np.ndarray
    n: int

    def __post_init__(self) -> None:
        risks = np.asarray(self.min_risks, dtype=float)
        if risks.ndim != 1 or risks.size < 1:
            raise ValueError("min_risks must be a non-empty 1-d sequence")
        object.__setattr__(self, "min_risks", risks)

    @property
    def m(self) -> int:
        return int(self.min_risks.size)


@dataclass(frozen=True)
class SelectionResult:
    """Selected index with the penalized score table that produced it."""

    chosen_k: int
    scores: np.ndarray
    penalties: np.ndarray


def select(profile: RiskProfile, spec: PenaltySpec) -> SelectionResult:
    """Apply the selection rule to a risk profile.

    ``scores[k-1] = min_risks[k-1] + P(k, n)``; the chosen index is the
    smallest argmin of the scores.
    """
    if profile.m != spec.m:
        raise ValueError(
            f"profile has {profile.m} hypotheses but spec carries {spec.m} constants"
        )
    if not np.all(np.isfinite(profile.min_risks)):
        raise ValueError("risk profile contains non-finite values")
    penalties = np.array(
        [penalty_value(spec, k, profile.n) for k in range(1, profile.m + 1)]
    )
    scores = profile.min_risks + penalties
    chosen = int(np.argmin(scores)) + 1  # argmin returns the first minimizer
    return SelectionResult(chosen_k=chosen, scores=scores, penalties=penalties)


class FitterError(RuntimeError):
    """A per-hypothesis risk minimizer failed; carries the failing index."""

    def __init__(self, k: int, message: str) -> None:
        super().__init__(f"fitter failed at k={k}: {message}")
        self.k = k


Fitter = Callable[[np.ndarray, int], float]


def sweep(fitter: Fitter, data: np.ndarray, m: int) -> RiskProfile:
    """Evaluate a risk minimizer at every order ``k = 1..m``.

    The fitter maps ``(data, k)`` to the minimized empirical risk at
    order ``k``; any exception it raises is re-raised as a
    :class:`FitterError` tagged with the failing ``k``.
    """
    if m < 1:
        raise ValueError(f"max index m must be >= 1, got {m}")
    data = np.asarray(data, dtype=float)
    risks = np.empty(m)
    for k in range(1, m + 1):
        try:
            risks[k - 1] = float(fitter(data, k))
        except Exception as exc:  # noqa: BLE001 - contract: tag and re-raise
            raise FitterError(k, str(exc)) from exc
    return RiskProfile(min_risks=risks, n=int(data.shape[0]))
