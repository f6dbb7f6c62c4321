import math

import numpy as np
import pytest

from riskselect.gmm import (
    EmConfig,
    EmFailure,
    GmmParams,
    _initial_responsibilities,
    _log_mixture_rows,
    _row_outer,
    component_param_count,
    fit_em,
    log_density,
    mixture_penalty_constants,
    run_em,
)

LOG_2PI = math.log(2.0 * math.pi)


def single_standard(d):
    return GmmParams(
        weights=np.array([1.0]),
        means=np.zeros((1, d)),
        covariances=np.eye(d)[None],
    )


def clusters(rng, n, means, sigma=1.0):
    means = np.asarray(means, dtype=float)
    idx = rng.integers(0, len(means), n)
    return means[idx] + rng.normal(0.0, sigma, (n, means.shape[1]))


class TestLogDensity:
    def test_standard_bivariate_mode(self):
        assert log_density(single_standard(2), np.zeros(2)) == pytest.approx(-LOG_2PI)

    def test_mixture_collapse(self):
        # two identical components equal the single-component density
        doubled = GmmParams(
            weights=np.array([0.5, 0.5]),
            means=np.zeros((2, 2)),
            covariances=np.stack([np.eye(2), np.eye(2)]),
        )
        x = np.array([0.3, -1.2])
        assert log_density(doubled, x) == pytest.approx(
            log_density(single_standard(2), x), abs=1e-12
        )

    def test_symmetric_two_component_at_origin(self):
        # pi = (1/2, 1/2), means +-1, unit variance: density at 0 is phi(1)
        params = GmmParams(
            weights=np.array([0.5, 0.5]),
            means=np.array([[1.0], [-1.0]]),
            covariances=np.ones((2, 1, 1)),
        )
        expect = -0.5 - 0.5 * LOG_2PI  # log phi(1; 0, 1)
        assert log_density(params, np.zeros(1)) == pytest.approx(expect, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            log_density(single_standard(2), np.zeros(3))


class TestPenaltyConstants:
    def test_examples(self):
        assert mixture_penalty_constants(3, 5) == [6.0, 12.0, 18.0]
        assert mixture_penalty_constants(1, 1) == [2.0]
        assert mixture_penalty_constants(8, 5) == [6.0 * k for k in range(1, 9)]

    def test_component_param_count(self):
        assert component_param_count(1) == 2
        assert component_param_count(2) == 5
        assert component_param_count(3) == 9

    def test_validation(self):
        with pytest.raises(ValueError):
            mixture_penalty_constants(0, 5)
        with pytest.raises(ValueError):
            mixture_penalty_constants(3, 0)


class TestFitEm:
    def test_single_component_closed_form(self):
        rng = np.random.default_rng(0)
        data = rng.normal(0, 1, (120, 2)) @ np.array([[1.0, 0.3], [0.0, 0.8]]) + 2.0
        params, nll = fit_em(data, 1, EmConfig(restarts=3, seed=1))
        mu = data.mean(axis=0)
        centered = data - mu
        cov = centered.T @ centered / len(data)
        closed = 0.5 * (2 * LOG_2PI + np.linalg.slogdet(cov)[1] + 2)
        assert nll == pytest.approx(closed, abs=1e-8)
        assert np.allclose(params.means[0], mu, atol=1e-8)

    def test_duplicated_rows_leave_nll_unchanged(self):
        rng = np.random.default_rng(1)
        data = clusters(rng, 80, [[0.0, 0.0], [4.0, 4.0]])
        doubled = np.vstack([data, data])
        cfg = EmConfig(restarts=8, seed=2)
        _, nll_single = fit_em(data, 2, cfg)
        _, nll_double = fit_em(doubled, 2, cfg)
        assert nll_double == pytest.approx(nll_single, abs=1e-5)

    def test_two_separated_clusters_beat_one(self):
        rng = np.random.default_rng(2)
        data = clusters(rng, 150, [[0.0, 0.0], [8.0, 8.0]], sigma=0.5)
        cfg = EmConfig(restarts=5, seed=3)
        _, nll1 = fit_em(data, 1, cfg)
        _, nll2 = fit_em(data, 2, cfg)
        assert nll2 < nll1 - 0.5

    def test_sample_size_guard(self):
        with pytest.raises(ValueError):
            fit_em(np.zeros((3, 2)), 3, EmConfig())

    def test_weights_and_eigenvalue_bounds(self):
        rng = np.random.default_rng(3)
        data = clusters(rng, 200, [[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]])
        cfg = EmConfig(restarts=4, seed=4, var_floor=0.5, var_ceiling=0.9)
        params, _ = fit_em(data, 3, cfg)
        assert params.weights.sum() == pytest.approx(1.0, abs=1e-12)
        for cov in params.covariances:
            vals = np.linalg.eigvalsh(cov)
            assert np.all(vals >= 0.5 - 1e-9)
            assert np.all(vals <= 0.9 + 1e-9)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(4)
        data = clusters(rng, 100, [[0.0, 0.0], [5.0, 5.0]])
        params, nll = fit_em(data, 2, EmConfig(restarts=4, seed=5))
        flipped = GmmParams(
            weights=params.weights[::-1].copy(),
            means=params.means[::-1].copy(),
            covariances=params.covariances[::-1].copy(),
        )
        direct = -float(np.mean(_log_mixture_rows(data, params)))
        relabeled = -float(np.mean(_log_mixture_rows(data, flipped)))
        assert direct == pytest.approx(nll, abs=1e-12)
        assert relabeled == pytest.approx(nll, abs=1e-12)

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        data = clusters(rng, 90, [[0.0, 0.0], [4.0, 0.0]])
        cfg = EmConfig(restarts=3, seed=6)
        a = fit_em(data, 2, cfg)
        b = fit_em(data, 2, cfg)
        assert a[1] == b[1]
        assert np.array_equal(a[0].means, b[0].means)


class TestEmTrajectory:
    def test_monotone_loglik(self):
        rng = np.random.default_rng(6)
        for trial in range(20):
            data = clusters(rng, 60, [[0.0, 0.0], [3.0, 3.0]])
            resp = _initial_responsibilities(data, _row_outer(data), 2, trial, 0)
            run = run_em(data, resp, EmConfig(max_iters=60, seed=trial))
            deltas = np.diff(run.trace)
            clipped = run.clipped[1:]
            assert np.all(deltas[~clipped] >= -1e-10)

    def test_converged_flag(self):
        rng = np.random.default_rng(7)
        data = clusters(rng, 80, [[0.0, 0.0]])
        resp = _initial_responsibilities(data, _row_outer(data), 1, 0, 0)
        run = run_em(data, resp, EmConfig(max_iters=200, seed=0))
        assert run.converged

    def test_collapse_raises(self):
        data = np.zeros((5, 2))
        resp = np.zeros((5, 2))
        resp[:, 0] = 1.0  # second component starts empty
        with pytest.raises(EmFailure):
            run_em(data, resp, EmConfig(seed=0))


class TestGmmParamsValidation:
    def test_simplex_enforced(self):
        with pytest.raises(ValueError):
            GmmParams(
                weights=np.array([0.6, 0.6]),
                means=np.zeros((2, 1)),
                covariances=np.ones((2, 1, 1)),
            )

    def test_shape_consistency(self):
        with pytest.raises(ValueError):
            GmmParams(
                weights=np.array([1.0]),
                means=np.zeros((2, 1)),
                covariances=np.ones((1, 1, 1)),
            )
