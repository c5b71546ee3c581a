"""Multivariate normality tests: Mardia's skewness and kurtosis, Henze-Zirkler.

All three operate on Mahalanobis-whitened data using the biased (divisor n)
sample covariance. The double sums run through the same blockwise engine as
the kernel module, so samples of tens of thousands of rows are fine.

Statistics and null distributions:

  Skewness:  A = (1/(6n)) * sum_ij [(x_i - xbar)^T S^-1 (x_j - xbar)]^3,
             asymptotically chi-squared with d(d+1)(d+2)/6 degrees of
             freedom under normality; upper-tail p-value.

  Kurtosis:  B = sqrt(n / (8 d (d+2))) * (b2 - d(d+2)) with
             b2 = (1/n) * sum_i [(x_i - xbar)^T S^-1 (x_i - xbar)]^2,
             asymptotically standard normal; two-sided p-value.

  Henze-Zirkler: with whitened rows y_i, D_ij = |y_i - y_j|^2,
             D_i = |y_i|^2, and smoothing parameter
             beta = ((n (2d + 1)) / 4)^(1/(d+4)) / sqrt(2),

             T = n * [ (1/n^2) sum_ij exp(-beta^2 D_ij / 2)
                       - 2 (1+beta^2)^(-d/2) (1/n) sum_i
                             exp(-beta^2 D_i / (2 (1+beta^2)))
                       + (1+2 beta^2)^(-d/2) ].

             Under normality T is approximately lognormal with parameters
             derived from its asymptotic mean and variance (a = 1 + 2b^2,
             w = (1+b^2)(1+3b^2)):
               mean = 1 - a^(-d/2) (1 + d b^2/a + d(d+2) b^4 / (2 a^2))
               var  = 2 (1+4b^2)^(-d/2)
                      + 2 a^(-d) (1 + 2 d b^4/a^2 + 3 d(d+2) b^8 / (4 a^4))
                      - 4 w^(-d/2) (1 + 3 d b^4/(2w) + d(d+2) b^8 / (2 w^2))
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla
from scipy import stats as sstats

from . import _blocks
from .errors import InsufficientSample, InvalidData, SingularCovariance
from .linalg import _as_matrix

_P_UNDERFLOW = 1e-300  # below this, report 0: the value has no precision left

_BLOCK = 1024


@dataclass(frozen=True)
class SkewnessResult:
    statistic: float
    df: int
    p_value: float


@dataclass(frozen=True)
class KurtosisResult:
    statistic: float
    p_value: float


@dataclass(frozen=True)
class HenzeZirklerResult:
    statistic: float
    p_value: float


@dataclass(frozen=True)
class NormalityReport:
    skewness: SkewnessResult
    kurtosis: KurtosisResult
    henze_zirkler: HenzeZirklerResult
    n: int
    d: int
    alpha: float
    decisions: dict


def _validate(x) -> np.ndarray:
    arr = _as_matrix(x)
    n, d = arr.shape
    if n <= d:
        raise InsufficientSample(f"need more rows than dimensions (n > d), got n={n}, d={d}")
    if not np.all(np.isfinite(arr)):
        raise InvalidData("sample contains NaN or Inf entries")
    return arr


def _whiten(arr: np.ndarray) -> np.ndarray:
    """Rows y_i = L^-1 (x_i - xbar) with S = L L^T the biased covariance.

    Then y_i . y_j is exactly the Mahalanobis bilinear form. A single jitter
    retry (+1e-10 tr(S)/d on the diagonal) covers numerically rank-deficient
    samples before giving up.
    """
    n, d = arr.shape
    centered = arr - arr.mean(axis=0)
    cov = centered.T @ centered / n
    cov = (cov + cov.T) / 2.0
    try:
        chol = sla.cholesky(cov, lower=True)
    except sla.LinAlgError:
        jitter = 1e-10 * np.trace(cov) / d
        try:
            chol = sla.cholesky(cov + jitter * np.eye(d), lower=True)
        except sla.LinAlgError as exc:
            raise SingularCovariance(f"sample covariance is singular (jitter {jitter:.3e} did not help)") from exc
    return sla.solve_triangular(chol, centered.T, lower=True).T


def _clip_p(p: float) -> float:
    p = float(min(max(p, 0.0), 1.0))
    return 0.0 if p < _P_UNDERFLOW else p


def _skewness_whitened(w: np.ndarray) -> SkewnessResult:
    n, d = w.shape
    total = _blocks.cube_gram_sum(w, _BLOCK)
    a_stat = total / (6.0 * n)
    df = d * (d + 1) * (d + 2) // 6
    return SkewnessResult(statistic=float(a_stat), df=df, p_value=_clip_p(sstats.chi2.sf(a_stat, df)))


def _kurtosis_whitened(w: np.ndarray) -> KurtosisResult:
    n, d = w.shape
    sq = np.einsum("ij,ij->i", w, w)
    b2 = float(np.mean(sq * sq))
    b_stat = math.sqrt(n / (8.0 * d * (d + 2))) * (b2 - d * (d + 2))
    return KurtosisResult(statistic=float(b_stat), p_value=_clip_p(2.0 * sstats.norm.sf(abs(b_stat))))


def mardia_skewness(x) -> SkewnessResult:
    """Mardia's multivariate skewness test."""
    return _skewness_whitened(_whiten(_validate(x)))


def mardia_kurtosis(x) -> KurtosisResult:
    """Mardia's multivariate kurtosis test."""
    return _kurtosis_whitened(_whiten(_validate(x)))


def _henze_zirkler_whitened(w: np.ndarray) -> HenzeZirklerResult:
    n, d = w.shape
    beta = ((n * (2.0 * d + 1.0)) / 4.0) ** (1.0 / (d + 4.0)) / math.sqrt(2.0)
    b2 = beta * beta

    # sum_ij exp(-b^2 D_ij / 2) is an RBF Gram sum at sigma = 1/beta.
    pair_sum, _diag = _blocks.rbf_within_sums(w, 1.0 / beta, _BLOCK)
    sq = np.einsum("ij,ij->i", w, w)
    center_sum = float(np.exp(-b2 / (2.0 * (1.0 + b2)) * sq).sum())

    t_stat = n * (
        pair_sum / (n * n)
        - 2.0 * (1.0 + b2) ** (-d / 2.0) * center_sum / n
        + (1.0 + 2.0 * b2) ** (-d / 2.0)
    )

    a = 1.0 + 2.0 * b2
    wb = (1.0 + b2) * (1.0 + 3.0 * b2)
    mean = 1.0 - a ** (-d / 2.0) * (1.0 + d * b2 / a + d * (d + 2.0) * b2**2 / (2.0 * a * a))
    var = (
        2.0 * (1.0 + 4.0 * b2) ** (-d / 2.0)
        + 2.0 * a ** (-d) * (1.0 + 2.0 * d * b2**2 / a**2 + 3.0 * d * (d + 2.0) * b2**4 / (4.0 * a**4))
        - 4.0 * wb ** (-d / 2.0) * (1.0 + 3.0 * d * b2**2 / (2.0 * wb) + d * (d + 2.0) * b2**4 / (2.0 * wb * wb))
    )
    log_sd = math.sqrt(math.log1p(var / (mean * mean)))
    log_mu = math.log(math.sqrt(mean**4 / (var + mean * mean)))
    p = sstats.lognorm.sf(t_stat, log_sd, scale=math.exp(log_mu))
    return HenzeZirklerResult(statistic=float(t_stat), p_value=_clip_p(p))


def henze_zirkler(x) -> HenzeZirklerResult:
    """Henze-Zirkler normality test (lognormal p-value approximation)."""
    return _henze_zirkler_whitened(_whiten(_validate(x)))


def normality_report(x, alpha: float = 0.01) -> NormalityReport:
    """Run all three tests and decide reject/accept at the given level.

    The sample is whitened once and shared by the three statistics.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    arr = _validate(x)
    w = _whiten(arr)
    skew = _skewness_whitened(w)
    kurt = _kurtosis_whitened(w)
    hz = _henze_zirkler_whitened(w)
    decisions = {
        "mardia_skewness": "reject" if skew.p_value < alpha else "accept",
        "mardia_kurtosis": "reject" if kurt.p_value < alpha else "accept",
        "henze_zirkler": "reject" if hz.p_value < alpha else "accept",
    }
    return NormalityReport(
        skewness=skew,
        kurtosis=kurt,
        henze_zirkler=hz,
        n=arr.shape[0],
        d=arr.shape[1],
        alpha=alpha,
        decisions=decisions,
    )
