"""Moment estimation and symmetric linear algebra."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import linalg as sla

from genmetrics import (
    GaussianStats,
    InsufficientSample,
    InvalidData,
    NotPSD,
    ShapeError,
    estimate_stats,
    sym_eigendecomposition,
    trace_sqrt_product,
)


def random_psd(rng, d, rank=None):
    a = rng.standard_normal((d, rank or d))
    return a @ a.T


class TestEstimateStats:
    def test_two_point_unbiased(self):
        # hand computation: mean (1,0); centered rows (-1,0),(1,0); divisor 1
        s = estimate_stats(np.array([[0.0, 0.0], [2.0, 0.0]]), divisor="unbiased")
        assert_allclose(s.mean, [1.0, 0.0])
        assert_allclose(s.cov, [[2.0, 0.0], [0.0, 0.0]])
        assert s.n == 2

    def test_identical_rows_zero_cov(self):
        s = estimate_stats(np.tile([3.0, -1.0, 2.0], (7, 1)))
        assert_allclose(s.cov, np.zeros((3, 3)))

    def test_three_point_biased(self):
        # hand computation: divisor 3 gives (1 + 0 + 1) / 3
        s = estimate_stats(np.array([[-1.0], [0.0], [1.0]]), divisor="biased")
        assert_allclose(s.mean, [0.0])
        assert_allclose(s.cov, [[2.0 / 3.0]])

    def test_single_row_rejected(self):
        with pytest.raises(InsufficientSample):
            estimate_stats(np.array([[1.0, 2.0]]))

    def test_nan_rejected(self):
        with pytest.raises(InvalidData):
            estimate_stats(np.array([[0.0], [np.nan]]))

    def test_covariance_is_psd(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.standard_normal((rng.integers(2, 40), rng.integers(1, 10)))
            cov = estimate_stats(x).cov
            w = np.linalg.eigvalsh(cov)
            assert w.min() >= -1e-8 * max(np.abs(w).max(), 1e-300)


class TestEigendecomposition:
    def test_identity(self):
        w, v = sym_eigendecomposition(np.eye(3))
        assert_allclose(w, [1.0, 1.0, 1.0])

    def test_diagonal(self):
        w, v = sym_eigendecomposition(np.diag([4.0, 9.0]))
        assert_allclose(w, [4.0, 9.0])
        assert_allclose(np.abs(v), np.eye(2), atol=1e-12)

    def test_reconstruction(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal((8, 8))
        a = a + a.T
        w, v = sym_eigendecomposition(a)
        recon = v @ np.diag(w) @ v.T
        norm = np.linalg.norm(a)
        assert np.linalg.norm(a - recon) <= 1e-8 * max(1.0, norm)
        assert_allclose(v.T @ v, np.eye(8), atol=1e-8)
        assert np.all(np.diff(w) >= 0)

    def test_eigenvalue_sum_equals_trace(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            a = rng.standard_normal((6, 6))
            a = a + a.T
            w, _ = sym_eigendecomposition(a)
            assert_allclose(w.sum(), np.trace(a), rtol=1e-8)

    def test_non_symmetric_rejected(self):
        with pytest.raises(ShapeError):
            sym_eigendecomposition(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_non_square_rejected(self):
        with pytest.raises(ShapeError):
            sym_eigendecomposition(np.zeros((2, 3)))


class TestTraceSqrtProduct:
    def test_identity(self):
        assert_allclose(trace_sqrt_product(np.eye(3), np.eye(3)), 3.0)

    def test_commuting_diagonal(self):
        # sqrt(1*9) + sqrt(4*16) = 3 + 8
        got = trace_sqrt_product(np.diag([1.0, 4.0]), np.diag([9.0, 16.0]))
        assert_allclose(got, 11.0)

    def test_general_eigensolver_oracle(self):
        # independent oracle: eigenvalues of the non-symmetric product S1 S2
        rng = np.random.default_rng(3)
        for _ in range(10):
            s1 = random_psd(rng, 6)
            s2 = random_psd(rng, 6)
            expected = np.sqrt(np.clip(np.real(sla.eig(s1 @ s2)[0]), 0.0, None)).sum()
            assert_allclose(trace_sqrt_product(s1, s2), expected, rtol=1e-8)

    def test_rank_deficient_ok(self):
        rng = np.random.default_rng(4)
        s1 = random_psd(rng, 5, rank=2)
        s2 = random_psd(rng, 5, rank=3)
        expected = np.sqrt(np.clip(np.real(sla.eig(s1 @ s2)[0]), 0.0, None)).sum()
        assert_allclose(trace_sqrt_product(s1, s2), expected, rtol=1e-7, atol=1e-10)

    def test_zero_matrix(self):
        assert trace_sqrt_product(np.zeros((3, 3)), np.eye(3)) == 0.0

    def test_not_psd_rejected(self):
        with pytest.raises(NotPSD):
            trace_sqrt_product(np.diag([1.0, -1.0]), np.eye(2))
        with pytest.raises(NotPSD):
            trace_sqrt_product(np.eye(2), np.diag([1.0, -1.0]))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            trace_sqrt_product(np.eye(2), np.eye(3))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 8))
    def test_self_product_is_trace(self, seed, d):
        s = random_psd(np.random.default_rng(seed), d)
        assert_allclose(trace_sqrt_product(s, s), np.trace(s), rtol=1e-6)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 8))
    def test_symmetric_in_arguments(self, seed, d):
        rng = np.random.default_rng(seed)
        s1, s2 = random_psd(rng, d), random_psd(rng, d)
        a, b = trace_sqrt_product(s1, s2), trace_sqrt_product(s2, s1)
        assert_allclose(a, b, rtol=1e-6, atol=1e-12)


class TestGaussianStats:
    def test_symmetrized_on_construction(self):
        cov = np.array([[1.0, 0.5 + 5e-10], [0.5, 1.0]])
        s = GaussianStats(mean=np.zeros(2), cov=cov, n=10)
        assert_allclose(s.cov, s.cov.T)

    def test_asymmetric_rejected(self):
        with pytest.raises(ShapeError):
            GaussianStats(mean=np.zeros(2), cov=np.array([[1.0, 0.3], [0.0, 1.0]]), n=10)

    def test_small_n_rejected(self):
        with pytest.raises(InsufficientSample):
            GaussianStats(mean=np.zeros(1), cov=np.eye(1), n=1)

    def test_population_stats_have_no_n(self):
        s = GaussianStats(mean=np.zeros(1), cov=np.eye(1), n=None)
        assert s.n is None
