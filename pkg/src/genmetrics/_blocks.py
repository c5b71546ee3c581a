"""Blockwise pairwise-sum engine shared by the kernel and normality modules.

All double sums over row pairs (RBF kernel sums, cubed-Gram sums) are
evaluated block by block so no full n x n matrix is ever materialized.
Block strips may run on a thread pool, but partial sums are always combined
in row-major strip order, so the result is bit-identical for any worker
count. The GENMETRICS_THREADS environment variable caps the worker count.

RBF blocks use an augmented matrix product: with row scalings folded into
two extra columns, a single matrix multiply yields the exponent
-(|x|^2 + |y|^2 - 2 x.y) / (2 sigma^2) directly. The exponent is clamped at
zero before exponentiation, which is exactly the conventional clamp of tiny
negative squared distances.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np


def worker_count() -> int:
    """Worker cap: GENMETRICS_THREADS if set, else half the visible CPUs."""
    env = os.environ.get("GENMETRICS_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, (os.cpu_count() or 1) // 2)


def _ordered_strip_sum(strips: list, strip_fn: Callable[[int], float]) -> float:
    """Evaluate strip_fn per strip (possibly on threads), reduce in order."""
    workers = min(worker_count(), len(strips))
    if workers <= 1:
        parts = [strip_fn(i) for i in range(len(strips))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(strip_fn, range(len(strips))))
    total = 0.0
    for p in parts:  # fixed order: independent of scheduling
        total += p
    return total


def augment_rbf(x: np.ndarray, y: np.ndarray, sigma: float) -> tuple[np.ndarray, np.ndarray]:
    """Pack the RBF exponent into a single matrix product.

    Returns (XA, YA) such that XA @ YA.T equals
    -(|x_i|^2 + |y_j|^2 - 2 x_i . y_j) / (2 sigma^2) entrywise.
    """
    gamma = 1.0 / (sigma * sigma)
    sx = np.einsum("ij,ij->i", x, x)
    sy = np.einsum("ij,ij->i", y, y)
    xa = np.column_stack([x * gamma, -0.5 * gamma * sx, np.ones(len(x))])
    ya = np.column_stack([y, np.ones(len(y)), -0.5 * gamma * sy])
    return xa, ya


def _rbf_block(xa: np.ndarray, ya: np.ndarray, buf: np.ndarray) -> np.ndarray:
    rows, cols = xa.shape[0], ya.shape[0]
    block = buf[: rows * cols].reshape(rows, cols)
    np.dot(xa, ya.T, out=block)
    np.minimum(block, 0.0, out=block)  # clamp: squared distances are >= 0
    np.exp(block, out=block)
    return block


def rbf_cross_sum(x: np.ndarray, y: np.ndarray, sigma: float, block_size: int) -> float:
    """Sum of exp(-|x_i - y_j|^2 / (2 sigma^2)) over all (i, j) pairs."""
    xa, ya = augment_rbf(x, y, sigma)
    m, n = len(xa), len(ya)
    starts = list(range(0, m, block_size))

    def strip(si: int) -> float:
        buf = np.empty(block_size * block_size)
        xs = xa[starts[si] : starts[si] + block_size]
        s = 0.0
        for j in range(0, n, block_size):
            s += float(_rbf_block(xs, ya[j : j + block_size], buf).sum())
        return s

    return _ordered_strip_sum(starts, strip)


def rbf_within_sums(x: np.ndarray, sigma: float, block_size: int) -> tuple[float, float]:
    """Within-set RBF sums: (all pairs including the diagonal, diagonal only).

    Only upper-triangular block pairs are evaluated; off-diagonal blocks
    count twice by symmetry.
    """
    xa, ya = augment_rbf(x, x, sigma)
    n = len(xa)
    starts = list(range(0, n, block_size))

    def strip(si: int) -> float:
        buf = np.empty(block_size * block_size)
        i = starts[si]
        xs = xa[i : i + block_size]
        s = 0.0
        for j in starts[si:]:
            block = _rbf_block(xs, ya[j : j + block_size], buf)
            bsum = float(block.sum())
            s += bsum if j == i else 2.0 * bsum
        return s

    total = _ordered_strip_sum(starts, strip)

    # Diagonal entries are exp(clamped self-exponent); compute them exactly
    # the same way so total - diag is the strict off-diagonal sum.
    diag = 0.0
    buf = np.empty(block_size * block_size)
    for i in starts:
        block = _rbf_block(xa[i : i + block_size], ya[i : i + block_size], buf)
        diag += float(np.trace(block))
    return total, diag


def cube_gram_sum(w: np.ndarray, block_size: int) -> float:
    """Sum of (w_i . w_j)^3 over all (i, j) pairs, including the diagonal."""
    n = len(w)
    starts = list(range(0, n, block_size))

    def strip(si: int) -> float:
        buf = np.empty(block_size * block_size)
        i = starts[si]
        ws = w[i : i + block_size]
        s = 0.0
        for j in starts[si:]:
            wj = w[j : j + block_size]
            block = buf[: ws.shape[0] * wj.shape[0]].reshape(ws.shape[0], wj.shape[0])
            np.dot(ws, wj.T, out=block)
            block *= block * block  # cube via multiplies; pow() is far slower
            bsum = float(block.sum())
            s += bsum if j == i else 2.0 * bsum
        return s

    return _ordered_strip_sum(starts, strip)
