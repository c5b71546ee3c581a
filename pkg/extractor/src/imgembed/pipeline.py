"""Extraction pipeline: image folder -> NPY v1.0 embeddings + manifest JSON.

The output container and the manifest schema are the metric toolkit's
interchange formats: a 2-D little-endian float NPY v1.0 file, and a JSON
manifest whose entries carry {embedding_file, count, dim, model_tag,
checksum} with the checksum being BLAKE2b (digest_size=8) of the file
content, hex-encoded. This module produces those files; it does not import
the metric package.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from PIL import Image, UnidentifiedImageError

from .models import SPECS, build_model, preprocessor


@dataclass(frozen=True)
class ExtractionJob:
    image_dir: str
    model: str = "clip-vitl14-336"
    batch_size: int = 32
    output: str = "embeddings.npy"
    device: str = "cpu"
    weights: str | None = None
    init_seed: int | None = None

    def __post_init__(self):
        if self.model not in SPECS:
            raise ValueError(f"unknown model {self.model!r}; choose from {sorted(SPECS)}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


def checksum_file(path: str | Path, chunk_size: int = 1 << 20) -> str:
    """64-bit content checksum (BLAKE2b, 8-byte digest) as 16 hex chars."""
    h = hashlib.blake2b(digest_size=8)
    with open(path, "rb") as fh:
        while True:
            chunk = fh.read(chunk_size)
            if not chunk:
                break
            h.update(chunk)
    return h.hexdigest()


def _model_tag(job: ExtractionJob) -> str:
    if job.init_seed is not None:
        return f"{job.model}(random-init, seed={job.init_seed})"
    if job.weights is not None:
        return f"{job.model}(weights={Path(job.weights).name})"
    return job.model


def _load_images(image_dir: Path):
    """Decode every regular file in sorted-name order; collect failures.

    The order is a pure function of the file names (codepoint sort, no
    locale involvement), so row order is reproducible everywhere.
    """
    decoded, skipped = [], []
    for path in sorted(p for p in image_dir.iterdir() if p.is_file()):
        try:
            with Image.open(path) as img:
                decoded.append((path.name, img.convert("RGB")))
        except (UnidentifiedImageError, OSError) as exc:
            print(f"warning: skipping {path.name}: {exc}", file=sys.stderr)
            skipped.append(path.name)
    return decoded, skipped


def extract(job: ExtractionJob) -> dict:
    """Run the extraction; returns the manifest entry for the output file.

    Writes the embeddings as float32 NPY v1.0 and a manifest JSON next to
    the output (``<output>.manifest.json``) that also records any skipped
    files. Embeddings are raw model outputs; any normalization is left to
    the metric side so it stays auditable there.
    """
    image_dir = Path(job.image_dir)
    if not image_dir.is_dir():
        raise FileNotFoundError(f"{image_dir} is not a directory")
    decoded, skipped = _load_images(image_dir)
    if not decoded:
        raise ValueError(f"{image_dir} contains no decodable images")

    spec = SPECS[job.model]
    prep = preprocessor(spec)
    model = build_model(job.model, weights=job.weights, init_seed=job.init_seed, device=job.device)

    chunks = []
    with torch.no_grad():
        for start in range(0, len(decoded), job.batch_size):
            batch = torch.stack([prep(img) for _, img in decoded[start : start + job.batch_size]])
            chunks.append(model(batch.to(job.device)).cpu().numpy())
    emb = np.concatenate(chunks, axis=0).astype(np.float32)

    if emb.shape != (len(decoded), spec.dim):
        raise RuntimeError(f"unexpected embedding shape {emb.shape}, wanted ({len(decoded)}, {spec.dim})")
    if not np.all(np.isfinite(emb)):
        raise RuntimeError("model produced non-finite embeddings")

    out = Path(job.output)
    np.save(out, emb)  # 2-D float32 -> NPY v1.0 container

    entry = {
        "embedding_file": out.name,
        "count": int(emb.shape[0]),
        "dim": int(emb.shape[1]),
        "model_tag": _model_tag(job),
        "checksum": checksum_file(out),
    }
    manifest = {"entries": [entry], "skipped": skipped}
    manifest_path = out.with_name(out.name + ".manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return entry
