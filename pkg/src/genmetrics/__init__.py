"""Distribution-distance metrics between embedding sets.

Frechet distance on Gaussian summaries (FID-style), its bias-extrapolated
variant, the unbiased RBF-kernel MMD with the CMMD preset, multivariate
normality tests, and the covariance-matched mixture experiment that shows
why moment-only metrics can be blind.
"""

__version__ = "0.1.0"

from .embeddings import (
    EmbeddingSet,
    checksum_file,
    manifest_entry,
    read_array,
    read_manifest,
    subsample,
    validate_manifest,
    write_array,
    write_manifest,
)
from .errors import (
    GenMetricsError,
    InsufficientSample,
    InvalidData,
    InvalidLambda,
    NotNpy,
    NotPSD,
    NumericalError,
    ShapeError,
    SingularCovariance,
    UnsupportedDtype,
    UnsupportedLayout,
)
from .frechet import ExtrapolationConfig, FrechetResult, fid, fid_infinity, frechet_gaussian
from .linalg import GaussianStats, estimate_stats, sym_eigendecomposition, trace_sqrt_product
from .mmd import KernelConfig, MmdResult, analytic_gaussian_mmd, cmmd, mmd_unbiased, rbf_kernel
from .mog import MoGConfig, analytic_moments, sample_mixture, sample_reference, table2_experiment
from .normality import (
    HenzeZirklerResult,
    KurtosisResult,
    NormalityReport,
    SkewnessResult,
    henze_zirkler,
    mardia_kurtosis,
    mardia_skewness,
    normality_report,
)

__all__ = [
    "EmbeddingSet",
    "ExtrapolationConfig",
    "FrechetResult",
    "GaussianStats",
    "GenMetricsError",
    "HenzeZirklerResult",
    "InsufficientSample",
    "InvalidData",
    "InvalidLambda",
    "KernelConfig",
    "KurtosisResult",
    "MmdResult",
    "MoGConfig",
    "NormalityReport",
    "NotNpy",
    "NotPSD",
    "NumericalError",
    "ShapeError",
    "SingularCovariance",
    "SkewnessResult",
    "UnsupportedDtype",
    "UnsupportedLayout",
    "analytic_gaussian_mmd",
    "analytic_moments",
    "checksum_file",
    "cmmd",
    "estimate_stats",
    "fid",
    "fid_infinity",
    "frechet_gaussian",
    "henze_zirkler",
    "manifest_entry",
    "mardia_kurtosis",
    "mardia_skewness",
    "mmd_unbiased",
    "normality_report",
    "read_array",
    "read_manifest",
    "rbf_kernel",
    "sample_mixture",
    "sample_reference",
    "subsample",
    "sym_eigendecomposition",
    "table2_experiment",
    "trace_sqrt_product",
    "validate_manifest",
    "write_array",
    "write_manifest",
]
