"""Frechet distance between Gaussian summaries, plus the extrapolated variant.

The squared distance between N(mu_a, S_a) and N(mu_b, S_b) is

    |mu_a - mu_b|^2 + Tr(S_a) + Tr(S_b) - 2 Tr((S_a S_b)^(1/2))

which is exact only when both distributions really are Gaussian; applied to
sample moments of arbitrary embeddings it is the FID-style estimate. The
extrapolated variant removes the finite-sample bias by fitting the estimate
against 1/N over a schedule of subset sizes and reporting the intercept.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingSet
from .errors import InsufficientSample, NumericalError, ShapeError
from .linalg import GaussianStats, estimate_stats, trace_sqrt_product

# Squared distances down to this value are treated as float artifacts of an
# exact zero and clamped; anything lower is a hard numerical failure.
NEGATIVE_CLAMP = -1e-6


@dataclass(frozen=True)
class FrechetResult:
    distance_squared: float
    n_ref: int | None = None
    n_gen: int | None = None
    divisor: str | None = None
    clamped: bool = False


@dataclass(frozen=True)
class ExtrapolationConfig:
    """Subset schedule for the bias-extrapolated distance.

    ``min_size`` is auto-reduced to n // 2 when the generated set has fewer
    than 10000 rows, so the default works on small sets too.
    """

    num_points: int = 15
    min_size: int = 5000
    seed: int = 0

    def __post_init__(self):
        if self.num_points < 3:
            raise ValueError(f"num_points must be >= 3, got {self.num_points}")
        if self.min_size < 2:
            raise ValueError(f"min_size must be >= 2, got {self.min_size}")

    def effective_min_size(self, n: int) -> int:
        if n < 10000:
            return min(self.min_size, n // 2)
        return self.min_size


def frechet_gaussian(a: GaussianStats, b: GaussianStats) -> FrechetResult:
    """Closed-form squared Frechet distance between two Gaussian summaries."""
    if a.dim != b.dim:
        raise ShapeError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if np.array_equal(a.mean, b.mean) and np.array_equal(a.cov, b.cov):
        # identical summaries have distance exactly zero; skip the float path
        return FrechetResult(distance_squared=0.0, n_ref=a.n, n_gen=b.n)
    dm = a.mean - b.mean
    dist2 = float(dm @ dm + np.trace(a.cov) + np.trace(b.cov) - 2.0 * trace_sqrt_product(a.cov, b.cov))
    clamped = False
    if dist2 < 0.0:
        if dist2 < NEGATIVE_CLAMP:
            raise NumericalError(f"squared distance {dist2:.3e} is negative beyond the clamp tolerance")
        dist2, clamped = 0.0, True
    return FrechetResult(distance_squared=dist2, n_ref=a.n, n_gen=b.n, clamped=clamped)


def fid(ref, gen, divisor: str = "unbiased") -> FrechetResult:
    """Frechet distance between Gaussian fits of two embedding sets.

    Warns when either set has fewer rows than dimensions: the covariance
    estimate is then rank-deficient and the value is dominated by sampling
    error rather than the population distance.
    """
    stats_ref = estimate_stats(ref, divisor=divisor)
    stats_gen = estimate_stats(gen, divisor=divisor)
    d = stats_ref.dim
    if min(stats_ref.n, stats_gen.n) < d:
        warnings.warn(
            f"sample size {min(stats_ref.n, stats_gen.n)} is below the embedding "
            f"dimension {d}; the distance estimate will be unreliable",
            RuntimeWarning,
            stacklevel=2,
        )
    result = frechet_gaussian(stats_ref, stats_gen)
    return FrechetResult(
        distance_squared=result.distance_squared,
        n_ref=stats_ref.n,
        n_gen=stats_gen.n,
        divisor=divisor,
        clamped=result.clamped,
    )


def extrapolation_sizes(n: int, config: ExtrapolationConfig) -> np.ndarray:
    """Strictly increasing subset-size schedule ending at n."""
    min_size = config.effective_min_size(n)
    if not (2 <= min_size < n):
        raise InsufficientSample(f"generated set of {n} rows is too small to extrapolate from min_size={min_size}")
    sizes = np.unique(np.round(np.linspace(min_size, n, config.num_points)).astype(int))
    if len(sizes) < 3:
        raise InsufficientSample(f"schedule [{min_size}, {n}] yields only {len(sizes)} distinct sizes")
    return sizes


def fid_infinity(ref, gen, config: ExtrapolationConfig | None = None, divisor: str = "unbiased") -> float:
    """Bias-extrapolated Frechet distance.

    Subsets of the generated set (the reference stays fixed) are drawn
    without replacement at each schedule size, the distance is computed per
    subset, and an ordinary least-squares line in 1/N is fit; the intercept
    is the infinite-sample extrapolation. Deterministic for a fixed seed.
    """
    config = config or ExtrapolationConfig()
    ref_arr = np.asarray(getattr(ref, "data", ref), dtype=np.float64)
    gen_arr = np.asarray(getattr(gen, "data", gen), dtype=np.float64)
    n = gen_arr.shape[0]
    sizes = extrapolation_sizes(n, config)

    stats_ref = estimate_stats(ref_arr, divisor=divisor)
    rng = np.random.default_rng(config.seed)
    values = np.empty(len(sizes))
    for k, size in enumerate(sizes):
        if size == n:
            subset = gen_arr
        else:
            idx = np.sort(rng.choice(n, size=size, replace=False))
            subset = gen_arr[idx]
        values[k] = frechet_gaussian(stats_ref, estimate_stats(subset, divisor=divisor)).distance_squared

    slope_intercept = np.polyfit(1.0 / sizes, values, 1)
    return float(slope_intercept[1])
