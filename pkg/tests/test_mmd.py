"""Unbiased MMD estimator, CMMD preset, and the analytic Gaussian oracle."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.spatial.distance import cdist

from genmetrics import (
    EmbeddingSet,
    GaussianStats,
    InsufficientSample,
    InvalidData,
    KernelConfig,
    NotPSD,
    ShapeError,
    analytic_gaussian_mmd,
    cmmd,
    mmd_unbiased,
    rbf_kernel,
)


def naive_mmd(x, y, sigma):
    """Single-block O(n^2) reference: direct evaluation of the estimator."""
    m, n = len(x), len(y)
    kxx = np.exp(-cdist(x, x, "sqeuclidean") / (2 * sigma**2))
    kyy = np.exp(-cdist(y, y, "sqeuclidean") / (2 * sigma**2))
    kxy = np.exp(-cdist(x, y, "sqeuclidean") / (2 * sigma**2))
    term_x = (kxx.sum() - np.trace(kxx)) / (m * (m - 1))
    term_y = (kyy.sum() - np.trace(kyy)) / (n * (n - 1))
    return term_x + term_y - 2 * kxy.sum() / (m * n)


class TestRbfKernel:
    def test_zero_distance(self):
        assert rbf_kernel([1.0, 2.0], [1.0, 2.0], 10.0) == 1.0

    def test_hand_value_sigma_10(self):
        # squared distance 200 at sigma 10 -> exp(-1)
        x = np.zeros(2)
        y = np.array([10.0, 10.0])
        assert_allclose(rbf_kernel(x, y, 10.0), math.exp(-1.0), rtol=1e-15)

    def test_hand_value_sigma_1(self):
        # squared distance 2 at sigma 1 -> exp(-1)
        assert_allclose(rbf_kernel([0.0, 0.0], [1.0, 1.0], 1.0), math.exp(-1.0), rtol=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            rbf_kernel([0.0], [0.0, 0.0], 1.0)


class TestMmdFixtures:
    def test_identical_constant_sets(self):
        x = np.zeros((2, 1))
        r = mmd_unbiased(x, x.copy(), KernelConfig(bandwidth_sigma=10.0, output_scale=1.0))
        assert r.raw_estimate == 0.0

    def test_two_point_hand_value(self):
        # within-set kernels are 1; cross distance 100 at sigma 10
        x = np.zeros((2, 1))
        y = np.full((2, 1), 10.0)
        r = mmd_unbiased(x, y, KernelConfig(bandwidth_sigma=10.0, output_scale=1.0))
        expected = 2.0 * (1.0 - math.exp(-0.5))
        assert_allclose(r.raw_estimate, expected, atol=1e-12)

    def test_value_is_scaled_raw(self):
        x = np.random.default_rng(0).standard_normal((5, 3))
        y = np.random.default_rng(1).standard_normal((6, 3))
        r = mmd_unbiased(x, y, KernelConfig(output_scale=1000.0))
        assert r.value == r.raw_estimate * 1000.0

    def test_small_sample_rejected(self):
        with pytest.raises(InsufficientSample):
            mmd_unbiased(np.zeros((1, 2)), np.zeros((3, 2)))

    def test_dim_mismatch(self):
        with pytest.raises(ShapeError):
            mmd_unbiased(np.zeros((3, 2)), np.zeros((3, 4)))

    def test_zero_row_under_normalization(self):
        x = np.array([[0.0, 0.0], [1.0, 0.0]])
        with pytest.raises(InvalidData):
            mmd_unbiased(x, x, KernelConfig(l2_normalize=True))


class TestBlockwiseEqualsNaive:
    @pytest.mark.parametrize("block_size", [1, 7, 64, 1024])
    def test_random_instances(self, block_size):
        rng = np.random.default_rng(42)
        for _ in range(5):
            m, n, d = rng.integers(2, 60), rng.integers(2, 60), rng.integers(1, 16)
            x = rng.standard_normal((m, d))
            y = rng.standard_normal((n, d)) + 0.3
            cfg = KernelConfig(bandwidth_sigma=2.5, output_scale=1.0, block_size=block_size)
            got = mmd_unbiased(x, y, cfg).raw_estimate
            want = naive_mmd(x, y, 2.5)
            assert_allclose(got, want, rtol=1e-9, atol=1e-13)

    def test_block_size_does_not_change_result(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((40, 5))
        y = rng.standard_normal((33, 5))
        values = [
            mmd_unbiased(x, y, KernelConfig(output_scale=1.0, block_size=b)).raw_estimate
            for b in (1, 7, 40, 1024)
        ]
        assert_allclose(values, values[0], rtol=1e-12)


class TestMmdProperties:
    def test_symmetry(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal((25, 4))
        y = rng.standard_normal((31, 4)) * 1.3
        cfg = KernelConfig(output_scale=1.0)
        a = mmd_unbiased(x, y, cfg).raw_estimate
        b = mmd_unbiased(y, x, cfg).raw_estimate
        assert_allclose(a, b, rtol=1e-12)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(13)
        x = rng.standard_normal((30, 3))
        y = rng.standard_normal((20, 3))
        cfg = KernelConfig(output_scale=1.0, block_size=8)
        base = mmd_unbiased(x, y, cfg).raw_estimate
        perm = mmd_unbiased(x[rng.permutation(30)], y[rng.permutation(20)], cfg).raw_estimate
        assert_allclose(perm, base, rtol=1e-12)

    def test_determinism(self):
        rng = np.random.default_rng(17)
        x = rng.standard_normal((50, 6))
        y = rng.standard_normal((60, 6))
        cfg = KernelConfig(block_size=16)
        assert mmd_unbiased(x, y, cfg).value == mmd_unbiased(x, y, cfg).value

    def test_worker_count_does_not_change_bits(self, monkeypatch):
        # ordered strip reduction: serial and threaded runs agree exactly
        rng = np.random.default_rng(19)
        x = rng.standard_normal((300, 5))
        y = rng.standard_normal((310, 5))
        cfg = KernelConfig(block_size=32)
        monkeypatch.setenv("GENMETRICS_THREADS", "1")
        serial = mmd_unbiased(x, y, cfg).value
        monkeypatch.setenv("GENMETRICS_THREADS", "4")
        threaded = mmd_unbiased(x, y, cfg).value
        assert serial == threaded

    def test_worker_count_env(self, monkeypatch):
        from genmetrics._blocks import worker_count

        monkeypatch.setenv("GENMETRICS_THREADS", "3")
        assert worker_count() == 3
        monkeypatch.setenv("GENMETRICS_THREADS", "not-a-number")
        assert worker_count() >= 1

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_raw_estimate_bounded(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((rng.integers(2, 30), 3)) * rng.uniform(0.1, 5)
        y = rng.standard_normal((rng.integers(2, 30), 3)) * rng.uniform(0.1, 5)
        r = mmd_unbiased(x, y, KernelConfig(bandwidth_sigma=rng.uniform(0.5, 20), output_scale=1.0))
        assert r.raw_estimate <= 4.0
        assert r.raw_estimate >= -4.0 / min(r.m, r.n) - 1e-9

    def test_unbiasedness_monte_carlo(self):
        # same distribution: mean over draws should sit within 3 SE of zero
        rng = np.random.default_rng(23)
        draws = np.empty(200)
        for t in range(200):
            x = rng.standard_normal((100, 4))
            y = rng.standard_normal((100, 4))
            draws[t] = mmd_unbiased(x, y, KernelConfig(bandwidth_sigma=2.0, output_scale=1.0)).raw_estimate
        se = draws.std(ddof=1) / math.sqrt(len(draws))
        assert abs(draws.mean()) < 3 * se


class TestCmmd:
    def test_self_comparison_bound(self):
        rng = np.random.default_rng(31)
        x = EmbeddingSet(data=rng.standard_normal((40, 8)))
        r = cmmd(x, EmbeddingSet(data=x.data.copy()))
        assert abs(r.value) <= 1000.0 * 4.0 / r.m

    def test_antipodal_hand_value(self):
        # unit rows e1 vs -e1: squared distance 4 after normalization
        x = np.tile([1.0, 0.0, 0.0], (2, 1))
        y = -x
        r = cmmd(EmbeddingSet(data=x), EmbeddingSet(data=y))
        expected_raw = 2.0 * (1.0 - math.exp(-4.0 / 200.0))
        assert_allclose(r.raw_estimate, expected_raw, atol=1e-12)
        assert_allclose(r.value, 39.60265338648949, atol=1e-9)

    def test_preset_config(self):
        cfg = KernelConfig.cmmd()
        assert cfg.bandwidth_sigma == 10.0
        assert cfg.output_scale == 1000.0
        assert cfg.l2_normalize

    def test_unequal_sizes_warn(self):
        rng = np.random.default_rng(37)
        x = EmbeddingSet(data=rng.standard_normal((10, 3)))
        y = EmbeddingSet(data=rng.standard_normal((12, 3)))
        with pytest.warns(RuntimeWarning):
            cmmd(x, y)


class TestAnalyticGaussianMmd:
    def _stats(self, mean, cov):
        return GaussianStats(mean=np.atleast_1d(mean), cov=np.atleast_2d(cov), n=None)

    def test_identical_populations(self):
        a = self._stats([0.0, 1.0], np.eye(2))
        assert analytic_gaussian_mmd(a, a, 5.0) == 0.0

    def test_point_masses(self):
        a = self._stats([0.0], [[0.0]])
        b = self._stats([10.0], [[0.0]])
        assert_allclose(analytic_gaussian_mmd(a, b, 10.0), 2.0 * (1.0 - math.exp(-0.5)), rtol=1e-14)

    def test_quadrature_oracle(self):
        # frozen from scipy dblquad of the three kernel expectations
        # (N(0,1) vs N(1,1), sigma=1), abs error of the oracle < 1e-12
        a = self._stats([0.0], [[1.0]])
        b = self._stats([1.0], [[1.0]])
        assert_allclose(analytic_gaussian_mmd(a, b, 1.0), 0.17726763492015207, atol=1e-6)

    def test_monte_carlo_agreement(self):
        # estimator mean over seeded draws matches the closed form within 3 SE
        a = self._stats(np.zeros(3), np.eye(3))
        b = self._stats([1.0, 0.0, 0.0], np.eye(3) * 1.5)
        target = analytic_gaussian_mmd(a, b, 3.0)
        rng = np.random.default_rng(41)
        chol_b = np.linalg.cholesky(b.cov)
        draws = np.empty(150)
        for t in range(150):
            x = rng.standard_normal((120, 3))
            y = b.mean + rng.standard_normal((120, 3)) @ chol_b.T
            draws[t] = mmd_unbiased(x, y, KernelConfig(bandwidth_sigma=3.0, output_scale=1.0)).raw_estimate
        se = draws.std(ddof=1) / math.sqrt(len(draws))
        assert abs(draws.mean() - target) < 3 * se

    def test_not_psd(self):
        a = self._stats([0.0, 0.0], np.diag([1.0, -1.0]))
        with pytest.raises(NotPSD):
            analytic_gaussian_mmd(a, a, 1.0)


class TestKernelConfig:
    def test_rejects_bad_sigma(self):
        with pytest.raises(InvalidData):
            KernelConfig(bandwidth_sigma=0.0)

    def test_rejects_bad_block(self):
        with pytest.raises(InvalidData):
            KernelConfig(block_size=0)
