"""riskselect: penalized empirical-risk model selection.

Selection rule, penalty families, three exact risk minimizers (Gaussian
mixture order, epsilon-insensitive regression subsets, PCA rank), and a
reproducible Monte Carlo benchmark harness.
"""

from .penalty import (
    GapScaling,
    GapVerdict,
    PenaltyGapDiagnostic,
    PenaltyKind,
    PenaltySpec,
    alpha_calibrate,
    diagnose_gap,
    log_plus,
    log_plus_iter,
    penalty_value,
)
from .selection import FitterError, RiskProfile, SelectionResult, select, sweep

__all__ = [
    "GapScaling",
    "GapVerdict",
    "PenaltyGapDiagnostic",
    "PenaltyKind",
    "PenaltySpec",
    "alpha_calibrate",
    "diagnose_gap",
    "log_plus",
    "log_plus_iter",
    "penalty_value",
    "FitterError",
    "RiskProfile",
    "SelectionResult",
    "select",
    "sweep",
]

__version__ = "0.1.0"
