"""Sample-efficiency and runtime experiment drivers behind the CLI."""

from __future__ import annotations

import time
import warnings

import numpy as np

from .embeddings import EmbeddingSet, subsample
from .errors import InsufficientSample
from .frechet import fid, frechet_gaussian
from .linalg import estimate_stats
from .mmd import KernelConfig, _assemble, _cross_sum, _prepare, _within_sum, mmd_unbiased


def sample_efficiency(
    ref: EmbeddingSet,
    gen: EmbeddingSet,
    sizes: list[int],
    seeds: list[int],
) -> list[dict]:
    """Metric stability as the generated set shrinks.

    Each (size, seed) row reports the metrics on a random subset of the
    generated set together with their values relative to the full-size
    baseline. Subsets are drawn without replacement, deterministically per
    (seed, size). The reference set never changes, so its moment statistics
    and within-set kernel sum are computed once and reused; the arithmetic
    per row is identical to calling the metrics directly.
    """
    if any(s > gen.n for s in sizes):
        raise InsufficientSample(f"requested size exceeds generated set of {gen.n} rows")

    kernel = KernelConfig.cmmd()
    ref_stats = estimate_stats(ref)
    ref_arr = _prepare(ref, kernel, "reference sample")
    sum_ref = _within_sum(ref_arr, kernel)

    def both_metrics(subset: EmbeddingSet) -> tuple[float, float]:
        fid_val = frechet_gaussian(ref_stats, estimate_stats(subset)).distance_squared
        sub_arr = _prepare(subset, kernel, "generated sample")
        cmmd_val = _assemble(
            sum_ref,
            _within_sum(sub_arr, kernel),
            _cross_sum(ref_arr, sub_arr, kernel),
            len(ref_arr),
            len(sub_arr),
            kernel,
        ).value
        return fid_val, cmmd_val

    full_fid, full_cmmd = both_metrics(gen)
    rows = []
    for seed in seeds:
        for size in sizes:
            sub = subsample(gen, size, seed=np.random.SeedSequence((seed, size)))
            fid_val, cmmd_val = both_metrics(sub)
            rows.append(
                {
                    "size": size,
                    "seed": seed,
                    "fid": fid_val,
                    "cmmd": cmmd_val,
                    "fid_rel": fid_val / full_fid if full_fid != 0.0 else float("nan"),
                    "cmmd_rel": cmmd_val / full_cmmd if full_cmmd != 0.0 else float("nan"),
                }
            )
    return rows


def bench(n: int, d: int, reps: int = 3, seed: int = 0, kernel: KernelConfig | None = None) -> dict:
    """Wall-time comparison of the two metric paths on synthetic data.

    Both metrics run on the same pair of N(0, I) samples; the Frechet timing
    includes moment estimation, mirroring how the metric is used. Metric
    values are identical across repetitions (same inputs); only timings vary.
    """
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    kernel = kernel or KernelConfig()
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, d))
    y = rng.standard_normal((n, d))

    fid_times, mmd_times = [], []
    fid_value = mmd_value = float("nan")
    for _ in range(reps):
        t0 = time.perf_counter()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)  # n < d is the point here
            fid_value = fid(x, y).distance_squared
        fid_times.append((time.perf_counter() - t0) * 1000.0)

        t0 = time.perf_counter()
        mmd_value = mmd_unbiased(x, y, kernel).value
        mmd_times.append((time.perf_counter() - t0) * 1000.0)

    def summary(ts: list[float]) -> dict:
        return {
            "median_ms": float(np.median(ts)),
            "min_ms": float(min(ts)),
            "max_ms": float(max(ts)),
        }

    return {
        "n": n,
        "d": d,
        "reps": reps,
        "seed": seed,
        "frechet": {"value": fid_value, **summary(fid_times)},
        "mmd": {"value": mmd_value, **summary(mmd_times)},
    }
