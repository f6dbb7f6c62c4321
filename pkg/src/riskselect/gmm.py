"""Gaussian mixture fitting by EM for order selection.

For each candidate order ``k`` the quantity that feeds selection is the
minimized average negative log-likelihood over the order-``k`` mixture
family with full covariances.  Compactness of the parameter space is
realized numerically by clipping every covariance eigenvalue into
``[var_floor, var_ceiling]`` at each M-step; means are left unbounded.

Each restart initializes deterministically from the configured seed and
the restart index: component means are seeded with distinct data rows
drawn from the keyed substream, and the starting responsibilities are
the posterior under those seeds.  (Symmetric initializations such as
flat-Dirichlet responsibility rows start every component at the data
centroid and reliably stall in collapsed local optima on clustered
data; point seeding breaks the symmetry at once.)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .streams import Stream

logger = logging.getLogger(__name__)

_LOG_2PI = math.log(2.0 * math.pi)


def component_param_count(d: int) -> int:
    """Free parameters of one full-covariance Gaussian component in R^d."""
    return d + d * (d + 1) // 2


def mixture_penalty_constants(m: int, q: int) -> list[float]:
    """Complexity constants ``c_k = k (1 + q)`` for orders ``k = 1..m``.

    ``q`` is the per-component parameter count; the extra 1 counts each
    component's weight (all ``k`` weights are counted even though only
    ``k - 1`` are free).
    """
    if m < 1 or q < 1:
        raise ValueError(f"need m >= 1 and q >= 1, got m={m}, q={q}")
    return [float(k * (1 + q)) for k in range(1, m + 1)]


@dataclass(frozen=True)
class GmmParams:
    """Mixture weights, means and covariances for one fitted order."""

    weights: np.ndarray      # (k,)
    means: np.ndarray        # (k, d)
    covariances: np.ndarray  # (k, d, d)

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        mu = np.atleast_2d(np.asarray(self.means, dtype=float))
        cov = np.asarray(self.covariances, dtype=float)
        if w.ndim != 1 or mu.shape[0] != w.size or cov.shape != (w.size, mu.shape[1], mu.shape[1]):
            raise ValueError("inconsistent parameter shapes")
        if np.any(w < 0) or abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must lie on the probability simplex")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", mu)
        object.__setattr__(self, "covariances", cov)

    @property
    def k(self) -> int:
        return int(self.weights.size)

    @property
    def dim(self) -> int:
        return int(self.means.shape[1])


@dataclass(frozen=True)
class EmConfig:
    """EM optimizer settings; defaults suit the benchmark scenarios."""

    restarts: int = 10
    max_iters: int = 500
    tol: float = 1e-8          # absolute change of the average log-likelihood
    var_floor: float = 1e-6    # smallest admissible covariance eigenvalue
    var_ceiling: float = 1e6   # largest admissible covariance eigenvalue
    seed: int = 0

    def __post_init__(self) -> None:
        if self.restarts < 1 or self.max_iters < 1 or self.tol <= 0:
            raise ValueError("restarts, max_iters must be >= 1 and tol > 0")
        if not 0 < self.var_floor < self.var_ceiling:
            raise ValueError("need 0 < var_floor < var_ceiling")


class EmFailure(RuntimeError):
    """Every restart of an EM fit collapsed numerically."""


def _precision_terms(means: np.ndarray, covs: np.ndarray):
    """Per-component precision data for quadratic-form evaluation.

    Returns flattened precisions (k, d*d), precision-weighted means
    (k, d), and the constant ``mu' P mu + log det Sigma`` per component.
    The quadratic form is then an affair of two matrix products.
    """
    k, d = means.shape
    try:
        chol = np.linalg.cholesky(covs)  # batched over components
    except np.linalg.LinAlgError:
        for z in range(k):
            try:
                np.linalg.cholesky(covs[z])
            except np.linalg.LinAlgError as exc:
                raise EmFailure(f"singular covariance in component {z}") from exc
        raise  # unreachable: some component must have failed
    inv_chol = np.linalg.inv(chol)
    prec = np.einsum("zji,zjk->zik", inv_chol, inv_chol)
    diag = np.diagonal(chol, axis1=1, axis2=2)
    log_det = 2.0 * np.sum(np.log(diag), axis=1)
    prec_mean = np.einsum("zij,zj->zi", prec, means)
    const = np.einsum("zi,zi->z", means, prec_mean) + log_det
    return prec.reshape(k, d * d), prec_mean, const


def _component_log_pdfs(x: np.ndarray, xx: np.ndarray, means: np.ndarray, covs: np.ndarray) -> np.ndarray:
    """Per-component Gaussian log densities, shape (n, k).

    ``xx`` holds the flattened outer products ``x_i x_i'`` (n, d*d),
    precomputed once per data set.
    """
    d = x.shape[1]
    prec_flat, prec_mean, const = _precision_terms(means, covs)
    quad = xx @ prec_flat.T - 2.0 * (x @ prec_mean.T) + const[None, :]
    return -0.5 * (d * _LOG_2PI + quad)


def _row_outer(x: np.ndarray) -> np.ndarray:
    n, d = x.shape
    return np.einsum("nd,ne->nde", x, x).reshape(n, d * d)


def _log_mixture_rows(x: np.ndarray, params: GmmParams) -> np.ndarray:
    """log of the mixture density at each row of ``x``, shape (n,)."""
    log_pdfs = _component_log_pdfs(x, _row_outer(x), params.means, params.covariances)
    with np.errstate(divide="ignore"):
        weighted = log_pdfs + np.log(params.weights)[None, :]
    top = weighted.max(axis=1)
    return top + np.log(np.exp(weighted - top[:, None]).sum(axis=1))


def log_density(params: GmmParams, x: np.ndarray) -> float:
    """Log mixture density at a single point, via log-sum-exp."""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    if x.shape[1] != params.dim:
        raise ValueError(f"point has dim {x.shape[1]}, mixture has {params.dim}")
    return float(_log_mixture_rows(x, params)[0])


def _clip_covariances(covs: np.ndarray, floor: float, ceiling: float) -> tuple[np.ndarray, bool]:
    """Eigenvalue-clip a stack of covariances into [floor, ceiling]."""
    covs = (covs + covs.transpose(0, 2, 1)) / 2.0
    vals, vecs = np.linalg.eigh(covs)  # batched over components
    needs = (vals[:, 0] < floor) | (vals[:, -1] > ceiling)
    if np.any(needs):
        clipped_vals = np.clip(vals[needs], floor, ceiling)
        rebuilt = np.einsum(
            "zij,zj,zkj->zik", vecs[needs], clipped_vals, vecs[needs]
        )
        covs = covs.copy()
        covs[needs] = (rebuilt + rebuilt.transpose(0, 2, 1)) / 2.0
    return covs, bool(np.any(needs))


@dataclass(frozen=True)
class EmRun:
    """Trajectory of one EM restart."""

    params: GmmParams
    avg_loglik: float
    trace: np.ndarray          # average log-likelihood after each iteration
    clipped: np.ndarray        # whether any covariance was clipped that iteration
    converged: bool


def _m_step(x, xx, resp, cfg):
    n, d = x.shape
    k = resp.shape[1]
    totals = resp.sum(axis=0)
    if np.any(totals <= 0.0) or not np.all(np.isfinite(totals)):
        raise EmFailure("a component lost all responsibility mass")
    weights = totals / n
    means = (resp.T @ x) / totals[:, None]
    second = (resp.T @ xx).reshape(k, d, d) / totals[:, None, None]
    covs = second - means[:, :, None] * means[:, None, :]
    covs, any_clip = _clip_covariances(covs, cfg.var_floor, cfg.var_ceiling)
    return GmmParams(weights=weights, means=means, covariances=covs), any_clip


def _e_step(x, xx, params):
    log_pdfs = _component_log_pdfs(x, xx, params.means, params.covariances)
    with np.errstate(divide="ignore"):
        weighted = log_pdfs + np.log(params.weights)[None, :]
    top = weighted.max(axis=1, keepdims=True)
    shifted = np.exp(weighted - top)
    norm = shifted.sum(axis=1, keepdims=True)
    resp = shifted / norm
    avg_ll = float(np.mean(top + np.log(norm)))
    return resp, avg_ll


def run_em(data: np.ndarray, resp: np.ndarray, cfg: EmConfig) -> EmRun:
    """Iterate EM from initial responsibilities until the average
    log-likelihood stabilizes.

    The likelihood is non-decreasing across iterations except possibly
    when eigenvalue clipping fires; those iterations are flagged in the
    returned trace.
    """
    x = np.asarray(data, dtype=float)
    xx = _row_outer(x)
    trace: list[float] = []
    clip_flags: list[bool] = []
    prev = -np.inf
    converged = False
    params: GmmParams | None = None
    for _ in range(cfg.max_iters):
        params, any_clip = _m_step(x, xx, resp, cfg)
        resp, avg_ll = _e_step(x, xx, params)
        if not math.isfinite(avg_ll):
            raise EmFailure("average log-likelihood became non-finite")
        trace.append(avg_ll)
        clip_flags.append(any_clip)
        if abs(avg_ll - prev) < cfg.tol:
            converged = True
            break
        prev = avg_ll
    assert params is not None
    if any(clip_flags):
        logger.debug("EM run clipped covariances on %d iterations", sum(clip_flags))
    return EmRun(
        params=params,
        avg_loglik=trace[-1],
        trace=np.array(trace),
        clipped=np.array(clip_flags, dtype=bool),
        converged=converged,
    )


def _initial_responsibilities(x: np.ndarray, xx: np.ndarray, k: int, seed: int, restart: int) -> np.ndarray:
    """Posterior responsibilities under point-seeded starting parameters."""
    n, d = x.shape
    stream = Stream("em-init", seed, k, restart)
    # k distinct row indices, drawn by ranking stream uniforms.
    order = np.argsort(stream.uniform(n), kind="stable")
    means = x[order[:k]]
    var = np.maximum(x.var(axis=0), 1e-12)
    covs = np.broadcast_to(np.diag(var), (k, d, d)).copy()
    log_pdfs = _component_log_pdfs(x, xx, means, covs)
    top = log_pdfs.max(axis=1, keepdims=True)
    resp = np.exp(log_pdfs - top)
    return resp / resp.sum(axis=1, keepdims=True)


def fit_em(data: np.ndarray, k: int, cfg: EmConfig) -> tuple[GmmParams, float]:
    """Best-of-restarts EM fit at order ``k``.

    Returns the winning parameters and the minimized average negative
    log-likelihood.  Ties between restarts go to the lowest restart
    index; a restart that collapses numerically is skipped, and
    :class:`EmFailure` is raised only if every restart fails.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise ValueError("data must be an n x d matrix")
    n = x.shape[0]
    if n <= k:
        raise ValueError(f"need more samples than components: n={n}, k={k}")
    xx = _row_outer(x)
    best: EmRun | None = None
    failures = 0
    for restart in range(cfg.restarts):
        resp = _initial_responsibilities(x, xx, k, cfg.seed, restart)
        try:
            run = run_em(x, resp, cfg)
        except EmFailure:
            failures += 1
            continue
        if best is None or run.avg_loglik > best.avg_loglik:
            best = run
    if best is None:
        raise EmFailure(f"all {cfg.restarts} EM restarts failed at k={k}")
    if failures:
        logger.debug("fit_em(k=%d): %d of %d restarts failed", k, failures, cfg.restarts)
    return best.params, -best.avg_loglik
