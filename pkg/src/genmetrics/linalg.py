"""Dense symmetric linear algebra and moment estimation.

Matrices are plain float64 numpy arrays in row-major order. Everything here
is a pure function; inputs are never mutated. All arithmetic is 64-bit even
when callers hold 32-bit data, because covariance matrices of
high-dimensional embeddings are badly conditioned in float32.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientSample, InvalidData, NotPSD, NumericalError, ShapeError

# Relative tolerance (against the largest |eigenvalue|) below which a
# negative eigenvalue still counts as PSD and is clipped to zero.
PSD_REL_TOL = 1e-8


def _as_matrix(x) -> np.ndarray:
    """Coerce an EmbeddingSet or array-like to a float64 2-D array."""
    arr = np.asarray(getattr(x, "data", x), dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-D array, got shape {arr.shape}")
    return arr


def _check_square_symmetric(a: np.ndarray, rel_tol: float = 1e-8) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    scale = np.abs(a).max() if a.size else 0.0
    if np.abs(a - a.T).max() > rel_tol * max(scale, 1e-300):
        raise ShapeError("matrix is not symmetric within tolerance")
    return a


@dataclass(frozen=True)
class GaussianStats:
    """Mean vector and covariance matrix summarizing a sample.

    ``n`` is the sample count the statistics were estimated from; ``None``
    marks analytic population moments (no sample involved). The covariance is
    symmetrized on construction and must already be symmetric to 1e-9
    relative tolerance.
    """

    mean: np.ndarray
    cov: np.ndarray
    n: int | None = None

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=np.float64))
        cov = np.asarray(self.cov, dtype=np.float64)
        if mean.ndim != 1:
            raise ShapeError(f"mean must be a vector, got shape {mean.shape}")
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] != mean.shape[0]:
            raise ShapeError(f"covariance shape {cov.shape} does not match mean length {mean.shape[0]}")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise InvalidData("statistics contain NaN or Inf")
        scale = np.abs(cov).max() if cov.size else 0.0
        if np.abs(cov - cov.T).max() > 1e-9 * max(scale, 1e-300):
            raise ShapeError("covariance is not symmetric within 1e-9 relative tolerance")
        if self.n is not None and self.n < 2:
            raise InsufficientSample(f"sample statistics need n >= 2, got n={self.n}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", (cov + cov.T) / 2.0)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def estimate_stats(x, divisor: str = "unbiased") -> GaussianStats:
    """Estimate mean and covariance of a sample of row vectors.

    Args:
        x: EmbeddingSet or (n, d) array, n >= 2, all entries finite.
        divisor: "unbiased" for the n-1 covariance divisor, "biased" for n.

    Returns:
        GaussianStats with a symmetric covariance and ``n`` recorded.
    """
    if divisor not in ("unbiased", "biased"):
        raise ValueError(f"divisor must be 'unbiased' or 'biased', got {divisor!r}")
    arr = _as_matrix(x)
    n = arr.shape[0]
    if n < 2:
        raise InsufficientSample(f"need at least 2 rows to estimate statistics, got {n}")
    if not np.all(np.isfinite(arr)):
        raise InvalidData("sample contains NaN or Inf entries")
    mean = arr.mean(axis=0)
    centered = arr - mean
    denom = n - 1 if divisor == "unbiased" else n
    cov = centered.T @ centered / denom
    cov = (cov + cov.T) / 2.0
    return GaussianStats(mean=mean, cov=cov, n=n)


def sym_eigendecomposition(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix: A = V diag(w) V^T.

    Eigenvalues are returned in ascending order with orthonormal
    eigenvectors in the columns of V.
    """
    a = _check_square_symmetric(a)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed to converge: {exc}") from exc
    return w, v


def _psd_eigvals(s: np.ndarray, name: str) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, validated and clipped to be PSD."""
    w = np.linalg.eigvalsh(s)
    bound = PSD_REL_TOL * max(np.abs(w).max(), 0.0) if w.size else 0.0
    if w.min() < -bound:
        raise NotPSD(f"{name} has eigenvalue {w.min():.3e}, below the PSD tolerance {-bound:.3e}")
    return np.clip(w, 0.0, None)


def trace_sqrt_product(s1: np.ndarray, s2: np.ndarray) -> float:
    """Trace of the matrix square root of the product of two PSD matrices.

    Evaluated through the symmetric form sqrt(S1) S2 sqrt(S1), which shares
    its spectrum with S1 S2 but stays symmetric, so a symmetric eigensolver
    applies. Eigenvalues within -PSD_REL_TOL * spectral norm are clipped to
    zero; anything lower raises NotPSD.
    """
    s1 = _check_square_symmetric(s1)
    s2 = _check_square_symmetric(s2)
    if s1.shape != s2.shape:
        raise ShapeError(f"matrix shapes differ: {s1.shape} vs {s2.shape}")

    w1, v1 = sym_eigendecomposition(s1)
    bound = PSD_REL_TOL * max(np.abs(w1).max(), 0.0) if w1.size else 0.0
    if w1.min() < -bound:
        raise NotPSD(f"first matrix has eigenvalue {w1.min():.3e}, below the PSD tolerance")
    _psd_eigvals(s2, "second matrix")

    sqrt1 = (v1 * np.sqrt(np.clip(w1, 0.0, None))) @ v1.T
    inner = sqrt1 @ s2 @ sqrt1
    inner = (inner + inner.T) / 2.0
    w = np.linalg.eigvalsh(inner)
    return float(np.sqrt(np.clip(w, 0.0, None)).sum())
