"""Benchmark scenarios, samplers, and the replicated experiment runner.

Twelve built-in scenarios cover three problem families:

* ``S1.1``-``S1.4``: bivariate normal mixtures (order selection, m = 8
  hypotheses).  Component means sit on a grid scaled by 2 or 3, weights
  are uniform, covariances are the identity.
* ``S2.1``-``S2.4``: linear regression with uniform covariates and unit
  normal noise, scored by the epsilon-insensitive L1 loss over nested
  leading-covariate subsets (m = 10).
* ``S3.1``-``S3.4``: degenerate-rank data ``x = A y`` with ``y`` drawn
  from an equicorrelated normal or multivariate Student-t law, scored by
  PCA reconstruction risk (m = 10 candidate ranks).

Every random draw comes from a substream keyed by
``(seed, scenario id, n, run index)``, so reports are bit-identical for
a given configuration regardless of parallelism.  Within one run all
criteria share a single fitted risk profile: criteria differ only
through their penalties.
"""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import gmm as gmm_mod
from . import pca as pca_mod
from . import svr as svr_mod
from .gmm import EmConfig, component_param_count, mixture_penalty_constants
from .numerics import SymMatrix, cholesky
from .pca import pca_penalty_constants
from .penalty import PenaltyKind, PenaltySpec, alpha_calibrate
from .selection import FitterError, RiskProfile, select, sweep
from .streams import Stream, derive_seed


class Family(enum.Enum):
    MIXTURE = "mixture"
    REGRESSION = "regression"
    PCA = "pca"


class YLaw(enum.Enum):
    NORMAL = "normal"
    STUDENT_T5 = "t5"


T_DOF = 5.0


@dataclass(frozen=True)
class MixturePayload:
    means: np.ndarray        # (k*, d)
    weights: np.ndarray      # (k*,)
    covariances: np.ndarray  # (k*, d, d)


@dataclass(frozen=True)
class RegressionPayload:
    theta: np.ndarray        # (m,)
    epsilon: float


@dataclass(frozen=True)
class PcaPayload:
    mixing: np.ndarray       # (ambient, k*) matrix A
    y_law: YLaw
    correlation: np.ndarray  # (k*, k*) matrix R


@dataclass(frozen=True)
class ScenarioConfig:
    """One benchmark scenario: family, true index, hypothesis range, payload."""

    id: str
    family: Family
    true_k: int
    m: int
    payload: MixturePayload | RegressionPayload | PcaPayload

    def __post_init__(self) -> None:
        if not 1 <= self.true_k <= self.m:
            raise ValueError(f"true_k={self.true_k} outside 1..{self.m}")
        if isinstance(self.payload, MixturePayload):
            if self.payload.means.shape[0] != self.true_k:
                raise ValueError("mixture payload has wrong component count")
        elif isinstance(self.payload, RegressionPayload):
            if self.payload.theta.size != self.m:
                raise ValueError("regression payload theta must have m entries")
        elif isinstance(self.payload, PcaPayload):
            if self.payload.mixing.shape[1] != self.true_k:
                raise ValueError("mixing matrix must have true_k columns")
            if self.payload.correlation.shape != (self.true_k, self.true_k):
                raise ValueError("correlation must be true_k x true_k")


def _grid_means(scale: float, cells: Sequence[tuple[int, int]]) -> np.ndarray:
    return scale * np.array(cells, dtype=float)


def _equicorrelation(dim: int, off_diag: float = 0.75) -> np.ndarray:
    r = np.full((dim, dim), off_diag)
    np.fill_diagonal(r, 1.0)
    return r


def _mixture_scenario(sid: str, scale: float, cells, m: int = 8) -> ScenarioConfig:
    means = _grid_means(scale, cells)
    k = means.shape[0]
    d = means.shape[1]
    return ScenarioConfig(
        id=sid,
        family=Family.MIXTURE,
        true_k=k,
        m=m,
        payload=MixturePayload(
            means=means,
            weights=np.full(k, 1.0 / k),
            covariances=np.broadcast_to(np.eye(d), (k, d, d)).copy(),
        ),
    )


def _regression_scenario(sid: str, theta, epsilon: float) -> ScenarioConfig:
    theta = np.asarray(theta, dtype=float)
    return ScenarioConfig(
        id=sid,
        family=Family.REGRESSION,
        true_k=int(np.max(np.nonzero(theta)) + 1),
        m=theta.size,
        payload=RegressionPayload(theta=theta, epsilon=epsilon),
    )


def _pca_scenario(sid: str, mixing: np.ndarray, y_law: YLaw) -> ScenarioConfig:
    mixing = np.asarray(mixing, dtype=float)
    k = mixing.shape[1]
    return ScenarioConfig(
        id=sid,
        family=Family.PCA,
        true_k=k,
        m=mixing.shape[0],
        payload=PcaPayload(mixing=mixing, y_law=y_law, correlation=_equicorrelation(k)),
    )


_CELLS_4 = [(1, 1), (1, 2), (2, 1), (2, 2)]
_CELLS_6 = [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)]

_THETA_4 = (1.0, 0.75, 0.5, 0.25, 0, 0, 0, 0, 0, 0)
_THETA_6 = (1.0, 0.85, 0.7, 0.55, 0.4, 0.25, 0, 0, 0, 0)

_MIXING_4 = np.array(
    [
        [1, 0, 0, 0],
        [0, 0.25, 0, 0],
        [0, 0, 0.1, 0],
        [0, 0, 0, 0.1],
        [1, 0.25, 0, 0],
        [0, 0.25, 0.1, 0],
        [0, 0, 0.1, 0.1],
        [1, 0.25, 0.1, 0],
        [0, 0.25, 0.1, 0.1],
        [1, 0.25, 0.1, 0.1],
    ],
    dtype=float,
)

_MIXING_6 = np.array(
    [
        [1, 0, 0, 0, 0, 0],
        [0, 0.5, 0, 0, 0, 0],
        [0, 0, 0.25, 0, 0, 0],
        [0, 0, 0, 0.25, 0, 0],
        [0, 0, 0, 0, 0.1, 0],
        [0, 0, 0, 0, 0, 0.1],
        [1, 0.5, 0, 0, 0, 0],
        [0, 0.5, 0.25, 0, 0, 0],
        [0, 0, 0.25, 0.25, 0, 0],
        [0, 0, 0, 0.25, 0.1, 0],
    ],
    dtype=float,
)


def scenario(sid: str) -> ScenarioConfig:
    """Look up a built-in scenario by id (``S1.1`` .. ``S3.4``)."""
    try:
        factory = _SCENARIOS[sid]
    except KeyError:
        raise KeyError(f"unknown scenario id {sid!r}; known: {sorted(_SCENARIOS)}") from None
    return factory()


_SCENARIOS = {
    "S1.1": lambda: _mixture_scenario("S1.1", 2.0, _CELLS_4),
    "S1.2": lambda: _mixture_scenario("S1.2", 3.0, _CELLS_4),
    "S1.3": lambda: _mixture_scenario("S1.3", 2.0, _CELLS_6),
    "S1.4": lambda: _mixture_scenario("S1.4", 3.0, _CELLS_6),
    "S2.1": lambda: _regression_scenario("S2.1", _THETA_4, 0.0),
    "S2.2": lambda: _regression_scenario("S2.2", _THETA_4, 1.0),
    "S2.3": lambda: _regression_scenario("S2.3", _THETA_6, 0.0),
    "S2.4": lambda: _regression_scenario("S2.4", _THETA_6, 1.0),
    "S3.1": lambda: _pca_scenario("S3.1", _MIXING_4, YLaw.NORMAL),
    "S3.2": lambda: _pca_scenario("S3.2", _MIXING_4, YLaw.STUDENT_T5),
    "S3.3": lambda: _pca_scenario("S3.3", _MIXING_6, YLaw.NORMAL),
    "S3.4": lambda: _pca_scenario("S3.4", _MIXING_6, YLaw.STUDENT_T5),
}

SCENARIO_IDS = tuple(sorted(_SCENARIOS))


# --- samplers ----------------------------------------------------------------

def sample_mvn(mean: np.ndarray, cov: SymMatrix, n: int, stream: Stream) -> np.ndarray:
    """Multivariate normal rows: ``mean + L z`` with ``L`` the Cholesky
    factor and ``z`` Box-Muller standard normals from the stream."""
    mean = np.asarray(mean, dtype=float)
    lower = cholesky(cov)
    z = stream.normal((n, mean.size))
    return mean + z @ lower.T


def sample_mvt(df: float, shape: SymMatrix, n: int, stream: Stream) -> np.ndarray:
    """Multivariate Student-t rows ``z / sqrt(w / df)``.

    ``shape`` is the scale matrix, not the covariance: the covariance of
    the resulting law is ``df / (df - 2)`` times the shape for df > 2.
    """
    if df <= 0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    z = sample_mvn(np.zeros(shape.dim), shape, n, stream)
    w = stream.chisquare(df, n)
    return z / np.sqrt(w / df)[:, None]


def sample_scenario(cfg: ScenarioConfig, n: int, stream: Stream) -> np.ndarray:
    """Draw one data matrix for a scenario.

    Mixture rows are d-vectors; regression rows stack ``(y, w)`` into
    ``1 + m`` columns; PCA rows are ambient vectors ``A y``.
    """
    if isinstance(cfg.payload, MixturePayload):
        pay = cfg.payload
        cum = np.cumsum(pay.weights)
        idx = np.searchsorted(cum, stream.uniform(n), side="right")
        idx = np.minimum(idx, pay.weights.size - 1)
        d = pay.means.shape[1]
        z = stream.normal((n, d))
        lowers = np.stack([cholesky(SymMatrix(c)) for c in pay.covariances])
        return pay.means[idx] + np.einsum("nij,nj->ni", lowers[idx], z)
    if isinstance(cfg.payload, RegressionPayload):
        pay = cfg.payload
        w = stream.uniform((n, pay.theta.size))
        noise = stream.normal(n)
        y = w @ pay.theta + noise
        return np.hstack([y[:, None], w])
    if isinstance(cfg.payload, PcaPayload):
        pay = cfg.payload
        shape = SymMatrix(pay.correlation)
        if pay.y_law is YLaw.NORMAL:
            y = sample_mvn(np.zeros(shape.dim), shape, n, stream)
        else:
            y = sample_mvt(T_DOF, shape, n, stream)
        return y @ pay.mixing.T
    raise TypeError(f"unknown payload type {type(cfg.payload)!r}")


# --- criteria ----------------------------------------------------------------

def scenario_constants(cfg: ScenarioConfig) -> list[float]:
    """The complexity constants ``c_k`` appropriate to a scenario family."""
    if cfg.family is Family.MIXTURE:
        d = cfg.payload.means.shape[1]
        return mixture_penalty_constants(cfg.m, component_param_count(d))
    if cfg.family is Family.REGRESSION:
        return [float(k) for k in range(1, cfg.m + 1)]
    return pca_penalty_constants(cfg.m, cfg.payload.mixing.shape[0])


@dataclass(frozen=True)
class Criterion:
    """A penalty spec paired with its stable report label."""

    label: str
    spec: PenaltySpec


def swic_label(beta: int, nu: float) -> str:
    return f"swic:b{beta}:v{int(nu)}"


def standard_criteria(
    cfg: ScenarioConfig,
    betas: Sequence[int] = (1, 2),
    nus: Sequence[float] = (1_000, 10_000),
) -> list[Criterion]:
    """AIC, BIC, and BIC-calibrated SWIC columns for one scenario."""
    constants = tuple(scenario_constants(cfg))
    crits = [
        Criterion("aic", PenaltySpec(PenaltyKind.AIC, constants)),
        Criterion("bic", PenaltySpec(PenaltyKind.BIC, constants)),
    ]
    for beta in betas:
        for nu in nus:
            spec = PenaltySpec(
                PenaltyKind.SWIC, constants, alpha=alpha_calibrate(beta, nu), beta=beta
            )
            crits.append(Criterion(swic_label(beta, nu), spec))
    return crits


# --- experiment runner -------------------------------------------------------

@dataclass(frozen=True)
class ReportRow:
    criterion: str
    n: int
    avg: float
    prop: float
    runs: int
    failures: int


@dataclass(frozen=True)
class ExperimentReport:
    scenario: str
    rows: tuple[ReportRow, ...]
    seed: int


def _family_fitter(cfg: ScenarioConfig, em_cfg: EmConfig | None):
    if cfg.family is Family.MIXTURE:
        assert em_cfg is not None

        def fit_mixture(data: np.ndarray, k: int) -> float:
            return gmm_mod.fit_em(data, k, em_cfg)[1]

        return fit_mixture
    if cfg.family is Family.REGRESSION:
        eps_spec = svr_mod.EpsilonLossSpec(cfg.payload.epsilon)

        def fit_regression(data: np.ndarray, k: int) -> float:
            sample = svr_mod.RegressionSample.from_matrix(data)
            return svr_mod.fit_subset(sample, k, eps_spec)[1]

        return fit_regression

    cache: dict[int, RiskProfile] = {}

    def fit_rank(data: np.ndarray, k: int) -> float:
        # One eigendecomposition serves the whole sweep over this data set.
        key = id(data)
        if key not in cache:
            cache.clear()
            cache[key] = pca_mod.rank_risk_profile(pca_mod.second_moment(data), cfg.m)
        return float(cache[key].min_risks[k - 1])

    return fit_rank


def scenario_em_config(cfg: ScenarioConfig) -> EmConfig:
    """Benchmark-appropriate EM settings for a mixture scenario.

    The mixture hypothesis classes are compact: component covariance
    eigenvalues are confined to a box.  An unbounded-from-below box
    admits degenerate spike components (a tiny-variance component glued
    to a couple of near-duplicate points buys large likelihood gains and
    wrecks order selection at moderate n), so the benchmark box floor is
    tied to the scenario itself: half the smallest eigenvalue any
    generative component has.
    """
    if cfg.family is not Family.MIXTURE:
        raise ValueError(f"scenario {cfg.id} is not a mixture scenario")
    smallest = min(
        float(np.linalg.eigvalsh(c)[0]) for c in cfg.payload.covariances
    )
    return EmConfig(var_floor=max(smallest / 2.0, 1e-6))


def run_profile(cfg: ScenarioConfig, n: int, run: int, seed: int, em_config: EmConfig | None = None) -> RiskProfile:
    """Sample one data set and fit its full risk profile.

    The data substream is keyed by ``(seed, scenario id, n, run)``; for
    mixture scenarios the EM seed is derived from the same labels and
    the optimizer settings default to :func:`scenario_em_config`.
    """
    stream = Stream("data", seed, cfg.id, n, run)
    data = sample_scenario(cfg, n, stream)
    em_cfg = None
    if cfg.family is Family.MIXTURE:
        base = em_config if em_config is not None else scenario_em_config(cfg)
        em_cfg = replace(base, seed=derive_seed("em", seed, cfg.id, n, run))
    fitter = _family_fitter(cfg, em_cfg)
    return sweep(fitter, data, cfg.m)


def _simulate_one(args) -> tuple[int, int, dict[str, int] | None]:
    cfg, criteria, n, run, seed, em_config = args
    try:
        profile = run_profile(cfg, n, run, seed, em_config)
    except FitterError:
        return n, run, None
    chosen = {crit.label: select(profile, crit.spec).chosen_k for crit in criteria}
    return n, run, chosen


def run_experiment(
    cfg: ScenarioConfig,
    criteria: Sequence[Criterion],
    n_list: Sequence[int],
    runs: int,
    seed: int,
    em_config: EmConfig | None = None,
    parallelism: int = 1,
) -> ExperimentReport:
    """Replicate the selection experiment and aggregate Avg and Prop.

    For every ``(n, run)`` pair one data set is drawn and one risk
    profile is fitted; every criterion is then applied to that shared
    profile.  Runs whose fit fails at any order are excluded from the
    aggregates and counted in the ``failures`` column.  Output is
    bit-identical for identical arguments, whatever ``parallelism``.
    """
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    if not n_list:
        raise ValueError("n_list must be non-empty")
    tasks = [
        (cfg, tuple(criteria), int(n), run, seed, em_config)
        for n in n_list
        for run in range(runs)
    ]
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            outcomes = list(pool.map(_simulate_one, tasks, chunksize=1))
    else:
        outcomes = [_simulate_one(t) for t in tasks]

    by_n: dict[int, list[dict[str, int] | None]] = {int(n): [None] * runs for n in n_list}
    for n, run, chosen in outcomes:
        by_n[n][run] = chosen

    rows = []
    for n in n_list:
        n = int(n)
        picks = [c for c in by_n[n] if c is not None]
        failures = runs - len(picks)
        for crit in criteria:
            if picks:
                ks = np.array([c[crit.label] for c in picks], dtype=float)
                avg = float(ks.mean())
                prop = float(np.mean(ks == cfg.true_k))
            else:
                avg, prop = float("nan"), 0.0
            rows.append(
                ReportRow(
                    criterion=crit.label,
                    n=n,
                    avg=avg,
                    prop=prop,
                    runs=len(picks),
                    failures=failures,
                )
            )
    return ExperimentReport(scenario=cfg.id, rows=tuple(rows), seed=seed)
