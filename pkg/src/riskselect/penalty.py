"""Complexity-penalty families for penalized risk selection.

A penalty family assigns a positive value ``P(k, n)`` to every hypothesis
index ``k`` and sample size ``n``.  The families implemented here:

=====================  ==============================================
AIC                    ``c_k / n``
BIC                    ``c_k * log(n) / (2n)``
Hannan-Quinn           ``c_k * log_plus_iter(n, 2) / (2n)``
SWIC                   ``alpha * c_k * sqrt(log_plus_iter(n, beta) / n)``
Generalized log-plus   ``alpha * c_k * log_plus_iter(n, beta) / n``
=====================  ==============================================

``c_1 < c_2 < ... < c_m`` are complexity constants supplied by the
problem family (e.g. parameter counts).  ``log_plus_iter`` is the
iterated ``max{1, log}`` map, which keeps every penalty strictly
positive and well defined for all ``n >= 1``.  All logarithms are
natural.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence


class PenaltyKind(enum.Enum):
    AIC = "aic"
    BIC = "bic"
    HANNAN_QUINN = "hq"
    SWIC = "swic"
    GENERALIZED_LOG_PLUS = "glp"


def log_plus(x: float) -> float:
    """Return ``max{1, log(x)}`` for ``x > 0``."""
    if x <= 0.0:
        raise ValueError(f"log_plus requires x > 0, got {x}")
    return max(1.0, math.log(x))


def log_plus_iter(n: float, beta: int) -> float:
    """beta-fold composition of :func:`log_plus` applied to ``n``.

    ``beta`` must be a positive integer; the result is always >= 1.
    """
    if beta < 1:
        raise ValueError(f"iteration order beta must be >= 1, got {beta}")
    value = float(n)
    for _ in range(int(beta)):
        value = log_plus(value)
    return value


@dataclass(frozen=True)
class PenaltySpec:
    """One penalty family instance.

    Parameters
    ----------
    kind : PenaltyKind
        Which functional family to evaluate.
    constants : sequence of float
        Complexity constants ``c_1 < c_2 < ... < c_m``, all positive.
    alpha : float
        Scale constant, used by SWIC and generalized log-plus penalties.
    beta : int
        Iterated-log order, used by SWIC and generalized log-plus penalties.
    """

    kind: PenaltyKind
    constants: tuple[float, ...]
    alpha: float = 1.0
    beta: int = 1

    def __post_init__(self) -> None:
        consts = tuple(float(c) for c in self.constants)
        object.__setattr__(self, "constants", consts)
        if len(consts) == 0:
            raise ValueError("constants must be non-empty")
        if consts[0] <= 0.0:
            raise ValueError("constants must be positive")
        if any(b <= a for a, b in zip(consts, consts[1:])):
            raise ValueError("constants must be strictly increasing")
        if self.alpha <= 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.beta < 1:
            raise ValueError(f"beta must be >= 1, got {self.beta}")

    @property
    def m(self) -> int:
        return len(self.constants)


def penalty_value(spec: PenaltySpec, k: int, n: float) -> float:
    """Evaluate ``P(k, n)`` for hypothesis index ``k`` (1-based).

    Strictly positive for every ``n >= 1`` and strictly increasing in
    ``k`` at fixed ``n``.
    """
    if not 1 <= k <= spec.m:
        raise IndexError(f"hypothesis index k={k} outside 1..{spec.m}")
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    c_k = spec.constants[k - 1]
    if spec.kind is PenaltyKind.AIC:
        return c_k / n
    if spec.kind is PenaltyKind.BIC:
        # Exactly c_k log(n) / (2n); strictly positive for n >= 2.
        return c_k * math.log(n) / (2.0 * n)
    if spec.kind is PenaltyKind.HANNAN_QUINN:
        return c_k * log_plus_iter(n, 2) / (2.0 * n)
    if spec.kind is PenaltyKind.SWIC:
        return spec.alpha * c_k * math.sqrt(log_plus_iter(n, spec.beta) / n)
    if spec.kind is PenaltyKind.GENERALIZED_LOG_PLUS:
        return spec.alpha * c_k * log_plus_iter(n, spec.beta) / n
    raise ValueError(f"unknown penalty kind {spec.kind!r}")


def alpha_calibrate(beta: int, nu: float) -> float:
    """Scale that makes the order-``beta`` SWIC equal the BIC at ``n = nu``.

    Returns ``log(nu) / (2 * sqrt(nu * log_plus_iter(nu, beta)))``.  With
    this alpha, SWIC and BIC produce identical penalties at sample size
    ``nu`` for every hypothesis index (shared constants cancel).
    """
    if beta < 1:
        raise ValueError(f"beta must be >= 1, got {beta}")
    if nu < 2:
        raise ValueError(f"calibration sample size nu must be >= 2, got {nu}")
    return math.log(nu) / (2.0 * math.sqrt(nu * log_plus_iter(nu, beta)))


# --- penalty-gap diagnostics -------------------------------------------------

class GapScaling(enum.Enum):
    SQRT_N = "sqrt_n"
    N = "n"
    SQRT_N_OVER_LOG_LOG = "sqrt_n_over_log_log"


class GapVerdict(enum.Enum):
    DIVERGING = "diverging"
    VANISHING = "vanishing"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class PenaltyGapDiagnostic:
    """Scaled penalty-gap samples for one index pair, with a verdict.

    The verdict is a finite-grid heuristic standing in for a limit
    statement: a strictly increasing sequence whose last value exceeds
    twice its first is called diverging, a strictly decreasing one whose
    last value falls below half its first is called vanishing, and
    anything else is inconclusive.
    """

    scaling: GapScaling
    pair: tuple[int, int]
    samples: tuple[tuple[float, float], ...] = field(repr=False)
    verdict: GapVerdict = GapVerdict.INCONCLUSIVE


def _gap_scale(scaling: GapScaling, n: float) -> float:
    if scaling is GapScaling.SQRT_N:
        return math.sqrt(n)
    if scaling is GapScaling.N:
        return n
    if scaling is GapScaling.SQRT_N_OVER_LOG_LOG:
        return math.sqrt(n / log_plus_iter(n, 2))
    raise ValueError(f"unknown scaling {scaling!r}")


def diagnose_gap(
    spec: PenaltySpec,
    k: int,
    l: int,
    n_grid: Sequence[float],
    scaling: GapScaling = GapScaling.SQRT_N,
) -> PenaltyGapDiagnostic:
    """Sample ``scale(n) * (P(l, n) - P(k, n))`` on a grid and classify it.

    Requires ``k < l`` and a strictly increasing grid with at least four
    points.  Used to check numerically which penalty families separate
    hypothesis indices under root-n or n scalings.
    """
    if k >= l:
        raise ValueError(f"need k < l, got k={k}, l={l}")
    grid = [float(n) for n in n_grid]
    if len(grid) < 4:
        raise ValueError("n_grid needs at least 4 points")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("n_grid must be strictly increasing")

    gaps = []
    for n in grid:
        gap = penalty_value(spec, l, n) - penalty_value(spec, k, n)
        gaps.append((n, _gap_scale(scaling, n) * gap))

    values = [g for _, g in gaps]
    increasing = all(b > a for a, b in zip(values, values[1:]))
    decreasing = all(b < a for a, b in zip(values, values[1:]))
    if increasing and values[-1] > 2.0 * values[0]:
        verdict = GapVerdict.DIVERGING
    elif decreasing and values[-1] <= 0.5 * values[0]:
        verdict = GapVerdict.VANISHING
    else:
        verdict = GapVerdict.INCONCLUSIVE
    return PenaltyGapDiagnostic(
        scaling=scaling, pair=(k, l), samples=tuple(gaps), verdict=verdict
    )
