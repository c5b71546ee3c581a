"""Image-folder to embedding-file extractor."""

__version__ = "0.1.0"

from .models import SPECS, ModelSpec, build_model
from .pipeline import ExtractionJob, checksum_file, extract
from .verify import verify

__all__ = [
    "SPECS",
    "ExtractionJob",
    "ModelSpec",
    "build_model",
    "checksum_file",
    "extract",
    "verify",
]
