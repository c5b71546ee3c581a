"""Unbiased maximum mean discrepancy with a Gaussian RBF kernel.

The estimator is the standard three-term U-statistic form: within-set kernel
averages exclude the diagonal (1/(m(m-1)) and 1/(n(n-1)) weights), the cross
term keeps all m*n pairs. The CMMD preset is this estimator with bandwidth
10, output scale 1000, and L2-normalized rows.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import _blocks
from .errors import InsufficientSample, InvalidData, NotPSD, ShapeError
from .linalg import GaussianStats, _as_matrix

# Lowest raw estimate that is numerically plausible: each within-set term is
# positive and the cross term is at most 2, so values far below -4/min(m,n)
# indicate a bug rather than estimator noise.


@dataclass(frozen=True)
class KernelConfig:
    """RBF bandwidth, output scale, normalization flag, and block size."""

    bandwidth_sigma: float = 10.0
    output_scale: float = 1000.0
    l2_normalize: bool = False
    block_size: int = 1024

    def __post_init__(self):
        if not (math.isfinite(self.bandwidth_sigma) and self.bandwidth_sigma > 0):
            raise InvalidData(f"bandwidth_sigma must be finite and positive, got {self.bandwidth_sigma}")
        if not (math.isfinite(self.output_scale) and self.output_scale > 0):
            raise InvalidData(f"output_scale must be finite and positive, got {self.output_scale}")
        if self.block_size < 1:
            raise InvalidData(f"block_size must be >= 1, got {self.block_size}")

    @classmethod
    def cmmd(cls) -> "KernelConfig":
        """The CMMD preset: sigma=10, scale 1000, unit-norm rows."""
        return cls(bandwidth_sigma=10.0, output_scale=1000.0, l2_normalize=True)


@dataclass(frozen=True)
class MmdResult:
    value: float
    raw_estimate: float
    m: int
    n: int
    config: KernelConfig


def rbf_kernel(x, y, sigma: float) -> float:
    """Gaussian RBF kernel exp(-|x - y|^2 / (2 sigma^2)) for two vectors."""
    if sigma <= 0:
        raise InvalidData(f"sigma must be positive, got {sigma}")
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ShapeError(f"vector lengths differ: {x.shape[0]} vs {y.shape[0]}")
    d = x - y
    return float(np.exp(-(d @ d) / (2.0 * sigma * sigma)))


def _prepare(x, config: KernelConfig, name: str) -> np.ndarray:
    arr = _as_matrix(x)
    if arr.shape[0] < 2:
        raise InsufficientSample(f"{name} needs at least 2 rows, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidData(f"{name} contains NaN or Inf entries")
    if config.l2_normalize:
        norms = np.linalg.norm(arr, axis=1)
        if np.any(norms == 0.0):
            raise InvalidData(f"{name} has a zero row; cannot L2-normalize")
        arr = arr / norms[:, None]
    return arr


def _within_sum(x: np.ndarray, config: KernelConfig) -> float:
    """Sum of k(x_i, x_j) over i != j."""
    total, diag = _blocks.rbf_within_sums(x, config.bandwidth_sigma, config.block_size)
    return total - diag


def _cross_sum(x: np.ndarray, y: np.ndarray, config: KernelConfig) -> float:
    return _blocks.rbf_cross_sum(x, y, config.bandwidth_sigma, config.block_size)


def _assemble(sum_xx: float, sum_yy: float, sum_xy: float, m: int, n: int, config: KernelConfig) -> MmdResult:
    raw = sum_xx / (m * (m - 1)) + sum_yy / (n * (n - 1)) - 2.0 * sum_xy / (m * n)
    return MmdResult(
        value=raw * config.output_scale,
        raw_estimate=raw,
        m=m,
        n=n,
        config=config,
    )


def mmd_unbiased(x, y, config: KernelConfig | None = None) -> MmdResult:
    """Unbiased squared-MMD estimate between two sets of row vectors.

    Args:
        x, y: EmbeddingSets or (m, d) / (n, d) arrays with m, n >= 2.
        config: kernel configuration; defaults to KernelConfig().

    Returns:
        MmdResult; ``value`` is ``raw_estimate * output_scale``.

    The computation is blockwise (no full Gram matrix is built) with a fixed
    reduction order, so results are identical for every block size and
    worker count up to float rounding of identically ordered sums.
    """
    config = config or KernelConfig()
    xa = _prepare(x, config, "first sample")
    ya = _prepare(y, config, "second sample")
    if xa.shape[1] != ya.shape[1]:
        raise ShapeError(f"dimension mismatch: {xa.shape[1]} vs {ya.shape[1]}")
    return _assemble(
        _within_sum(xa, config),
        _within_sum(ya, config),
        _cross_sum(xa, ya, config),
        len(xa),
        len(ya),
        config,
    )


def cmmd(ref, gen) -> MmdResult:
    """CMMD: unbiased RBF MMD at sigma=10, scale 1000, L2-normalized rows.

    Intended for equal-sized sets; unequal sizes are accepted with a warning.
    """
    config = KernelConfig.cmmd()
    m = getattr(ref, "n", None) or _as_matrix(ref).shape[0]
    n = getattr(gen, "n", None) or _as_matrix(gen).shape[0]
    if m != n:
        warnings.warn(f"CMMD is intended for equal-sized sets; got m={m}, n={n}", RuntimeWarning, stacklevel=2)
    return mmd_unbiased(ref, gen, config)


def _expected_rbf(mu1, cov1, mu2, cov2, sigma: float) -> float:
    """E[k(x, y)] for independent x ~ N(mu1, cov1), y ~ N(mu2, cov2).

    For z = x - y ~ N(dm, S) with S = cov1 + cov2:
        E[exp(-|z|^2 / (2 sigma^2))]
            = det(I + S / sigma^2)^(-1/2)
              * exp(-dm^T (S + sigma^2 I)^(-1) dm / 2)
    """
    d = mu1.shape[0]
    s = cov1 + cov2
    sig2 = sigma * sigma
    a = np.eye(d) + s / sig2
    sign, logdet = np.linalg.slogdet(a)
    if sign <= 0:
        raise NotPSD("covariance sum is not positive definite")
    dm = mu1 - mu2
    quad = float(dm @ np.linalg.solve(s + sig2 * np.eye(d), dm))
    return math.exp(-0.5 * quad - 0.5 * logdet)


def analytic_gaussian_mmd(a: GaussianStats, b: GaussianStats, sigma: float) -> float:
    """Population squared MMD between two Gaussians under the RBF kernel.

    Serves as the closed-form oracle for the unbiased estimator: the three
    expectation terms are each evaluated with the Gaussian integral of the
    kernel (see _expected_rbf).
    """
    if sigma <= 0:
        raise InvalidData(f"sigma must be positive, got {sigma}")
    if a.dim != b.dim:
        raise ShapeError(f"dimension mismatch: {a.dim} vs {b.dim}")
    for stats in (a, b):
        w = np.linalg.eigvalsh(stats.cov)
        if w.size and w.min() < -1e-8 * max(np.abs(w).max(), 0.0):
            raise NotPSD(f"covariance has eigenvalue {w.min():.3e}")
    exx = _expected_rbf(a.mean, a.cov, a.mean, a.cov, sigma)
    eyy = _expected_rbf(b.mean, b.cov, b.mean, b.cov, sigma)
    exy = _expected_rbf(a.mean, a.cov, b.mean, b.cov, sigma)
    return exx + eyy - 2.0 * exy
