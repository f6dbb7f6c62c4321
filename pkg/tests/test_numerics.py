import numpy as np
import pytest

from oracles import charpoly_eigenvalues
from riskselect.numerics import (
    NotPositiveDefiniteError,
    SymMatrix,
    cholesky,
    jacobi_eigen,
)


def random_symmetric(rng, d, scale=1.0):
    a = rng.normal(0, scale, (d, d))
    return SymMatrix((a + a.T) / 2.0)


class TestSymMatrix:
    def test_symmetrizes(self):
        m = SymMatrix(np.array([[1.0, 2.0 + 1e-13], [2.0, 3.0]]))
        assert m.entries[0, 1] == m.entries[1, 0]

    def test_rejects_asymmetry(self):
        with pytest.raises(ValueError):
            SymMatrix(np.array([[1.0, 2.0], [2.1, 3.0]]))

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            SymMatrix(np.zeros((2, 3)))


class TestJacobi:
    def test_identity(self):
        dec = jacobi_eigen(SymMatrix(np.eye(3)))
        assert np.allclose(dec.values, 1.0)

    def test_diagonal(self):
        dec = jacobi_eigen(SymMatrix(np.diag([3.0, 1.0])))
        assert np.allclose(dec.values, [3.0, 1.0])
        # axis vectors up to sign
        assert np.allclose(np.abs(dec.vectors), np.eye(2), atol=1e-12)

    def test_matches_charpoly_bisection(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            m = random_symmetric(rng, 4, scale=2.0)
            dec = jacobi_eigen(m)
            oracle = charpoly_eigenvalues(m.entries)
            assert oracle.size == 4
            assert np.max(np.abs(dec.values - oracle)) < 1e-8

    def test_orthonormal_and_reconstructs(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            m = random_symmetric(rng, 6)
            dec = jacobi_eigen(m)
            gram = dec.vectors.T @ dec.vectors
            assert np.max(np.abs(gram - np.eye(6))) < 1e-9
            recon = dec.vectors @ np.diag(dec.values) @ dec.vectors.T
            bound = 1e-8 * (1.0 + np.max(np.abs(m.entries)))
            assert np.max(np.abs(recon - m.entries)) < bound

    def test_trace_and_determinant_identities(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            raw = rng.normal(0, 1, (5, 5))
            m = SymMatrix(raw @ raw.T + 0.5 * np.eye(5))  # PD
            dec = jacobi_eigen(m)
            trace = float(np.trace(m.entries))
            assert abs(dec.values.sum() - trace) < 1e-9 * (1.0 + abs(trace))
            lower = cholesky(m)
            det = float(np.prod(np.diag(lower))) ** 2
            assert abs(np.prod(dec.values) - det) < 1e-6 * abs(det)

    def test_recovers_planted_spectrum(self):
        rng = np.random.default_rng(14)
        q, _ = np.linalg.qr(rng.normal(0, 1, (5, 5)))
        planted = np.array([9.0, 4.0, 1.5, 0.3, 0.01])
        m = SymMatrix(q @ np.diag(planted) @ q.T)
        dec = jacobi_eigen(m)
        assert np.max(np.abs(dec.values - planted)) < 1e-8

    def test_values_sorted_descending(self):
        rng = np.random.default_rng(15)
        dec = jacobi_eigen(random_symmetric(rng, 7))
        assert np.all(np.diff(dec.values) <= 0)


class TestCholesky:
    def test_identity(self):
        assert np.allclose(cholesky(SymMatrix(np.eye(4))), np.eye(4))

    def test_hand_worked(self):
        lower = cholesky(SymMatrix(np.array([[4.0, 2.0], [2.0, 5.0]])))
        assert np.allclose(lower, [[2.0, 0.0], [1.0, 2.0]])

    def test_equicorrelation_reconstructs(self):
        r = np.full((4, 4), 0.75)
        np.fill_diagonal(r, 1.0)
        lower = cholesky(SymMatrix(r))
        assert np.max(np.abs(lower @ lower.T - r)) < 1e-10
        assert np.allclose(np.triu(lower, 1), 0.0)

    def test_not_positive_definite(self):
        with pytest.raises(NotPositiveDefiniteError) as err:
            cholesky(SymMatrix(np.array([[1.0, 2.0], [2.0, 1.0]])))
        assert err.value.pivot_index == 1

    def test_random_reconstruction(self):
        rng = np.random.default_rng(16)
        for _ in range(20):
            raw = rng.normal(0, 1, (6, 6))
            m = SymMatrix(raw @ raw.T + 0.1 * np.eye(6))
            lower = cholesky(m)
            assert np.max(np.abs(lower @ lower.T - m.entries)) < 1e-10
