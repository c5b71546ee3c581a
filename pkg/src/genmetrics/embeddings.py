"""Embedding-set container plus NPY v1.0 and manifest file I/O.

The interchange format is the NPY v1.0 container restricted to 2-D
little-endian float arrays ("<f4" or "<f8", C order). Data is promoted to
float64 at load time; the downstream covariance arithmetic is too
ill-conditioned for 32-bit.

Manifests are JSON documents listing embedding files with their shapes and a
64-bit content checksum (BLAKE2b with an 8-byte digest, hex-encoded). The
checksum algorithm is fixed; changing it would invalidate existing manifests.
"""

from __future__ import annotations

import ast
import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    InsufficientSample,
    InvalidData,
    NotNpy,
    ShapeError,
    UnsupportedDtype,
    UnsupportedLayout,
)

_MAGIC = b"\x93NUMPY"
_SUPPORTED_DESCRS = ("<f4", "<f8")


@dataclass(frozen=True)
class EmbeddingSet:
    """An n x d matrix of feature vectors plus provenance metadata."""

    data: np.ndarray
    source: str = ""
    model_tag: str = ""

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise ShapeError(f"embedding data must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidData(f"embedding data must be non-empty, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidData("embedding data contains NaN or Inf entries")
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


def _parse_header_dict(header: str) -> dict:
    try:
        meta = ast.literal_eval(header)
    except (ValueError, SyntaxError) as exc:
        raise NotNpy(f"malformed NPY header: {exc}") from exc
    if not isinstance(meta, dict):
        raise NotNpy("NPY header is not a dictionary")
    return meta


def read_array(path: str | Path, *, source: str | None = None, model_tag: str = "") -> EmbeddingSet:
    """Read an NPY v1.0 file into an EmbeddingSet.

    Only 2-D "<f4" / "<f8" C-order arrays are accepted. Values are promoted
    to float64.

    Raises:
        NotNpy: bad magic bytes, unsupported container version, malformed or
            truncated content.
        UnsupportedLayout: fortran_order is true.
        UnsupportedDtype: descr is not "<f4" or "<f8".
        ShapeError: array rank is not 2.
        InvalidData: non-finite entries or an empty axis.
    """
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < 10 or raw[:6] != _MAGIC:
        raise NotNpy(f"{path}: not an NPY file (bad magic bytes)")
    major, minor = raw[6], raw[7]
    if (major, minor) != (1, 0):
        raise NotNpy(
            f"{path}: NPY version {major}.{minor} is not supported; "
            "only version 1.0 containers are accepted"
        )
    (header_len,) = struct.unpack("<H", raw[8:10])
    header_end = 10 + header_len
    if len(raw) < header_end:
        raise NotNpy(f"{path}: truncated NPY header")
    meta = _parse_header_dict(raw[10:header_end].decode("latin1"))

    descr = meta.get("descr")
    if descr not in _SUPPORTED_DESCRS:
        raise UnsupportedDtype(f"{path}: dtype {descr!r} not supported (need '<f4' or '<f8')")
    if meta.get("fortran_order", False):
        raise UnsupportedLayout(f"{path}: fortran_order arrays are not supported")
    shape = meta.get("shape")
    if not (isinstance(shape, tuple) and len(shape) == 2):
        raise ShapeError(f"{path}: expected a 2-D array, header shape is {shape!r}")

    n, d = int(shape[0]), int(shape[1])
    dtype = np.dtype(descr)
    expected = n * d * dtype.itemsize
    body = raw[header_end:]
    if len(body) < expected:
        raise NotNpy(f"{path}: truncated NPY data ({len(body)} of {expected} bytes)")
    data = np.frombuffer(body[:expected], dtype=dtype).reshape(n, d)
    return EmbeddingSet(data=data, source=source if source is not None else str(path), model_tag=model_tag)


def write_array(x: EmbeddingSet | np.ndarray, path: str | Path, dtype: str = "<f8") -> None:
    """Write embeddings as an NPY v1.0 file.

    The header is space-padded so the data section starts on a 64-byte
    boundary and ends with a newline, as standard NPY writers do.
    """
    if dtype not in _SUPPORTED_DESCRS:
        raise UnsupportedDtype(f"dtype {dtype!r} not supported (need '<f4' or '<f8')")
    arr = x.data if isinstance(x, EmbeddingSet) else np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"can only write 2-D arrays, got shape {arr.shape}")
    out = np.ascontiguousarray(arr, dtype=np.dtype(dtype))

    header = "{'descr': '%s', 'fortran_order': False, 'shape': (%d, %d), }" % (
        dtype,
        out.shape[0],
        out.shape[1],
    )
    # magic(6) + version(2) + header-length(2) + header + padding + '\n'
    unpadded = len(_MAGIC) + 2 + 2 + len(header) + 1
    pad = (64 - unpadded % 64) % 64
    header = header + " " * pad + "\n"

    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(bytes((1, 0)))
        fh.write(struct.pack("<H", len(header)))
        fh.write(header.encode("latin1"))
        fh.write(out.tobytes(order="C"))


def subsample(x: EmbeddingSet, k: int, seed) -> EmbeddingSet:
    """Draw k rows without replacement, preserving the original row order.

    Deterministic for a fixed seed.
    """
    if k < 1 or k > x.n:
        raise InsufficientSample(f"cannot draw {k} rows from a set of {x.n}")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(x.n, size=k, replace=False))
    return EmbeddingSet(data=x.data[idx], source=x.source, model_tag=x.model_tag)


def checksum_file(path: str | Path, chunk_size: int = 1 << 20) -> str:
    """64-bit streaming content checksum, as 16 hex characters.

    BLAKE2b with digest_size=8; fixed across package versions so manifests
    stay valid.
    """
    h = hashlib.blake2b(digest_size=8)
    with open(path, "rb") as fh:
        while True:
            chunk = fh.read(chunk_size)
            if not chunk:
                break
            h.update(chunk)
    return h.hexdigest()


def _read_header_shape(path: str | Path) -> tuple[int, int]:
    with open(path, "rb") as fh:
        head = fh.read(10)
        if len(head) < 10 or head[:6] != _MAGIC or (head[6], head[7]) != (1, 0):
            raise NotNpy(f"{path}: not an NPY v1.0 file")
        (header_len,) = struct.unpack("<H", head[8:10])
        meta = _parse_header_dict(fh.read(header_len).decode("latin1"))
    shape = meta.get("shape")
    if not (isinstance(shape, tuple) and len(shape) == 2):
        raise ShapeError(f"{path}: expected a 2-D array, header shape is {shape!r}")
    return int(shape[0]), int(shape[1])


def manifest_entry(path: str | Path, model_tag: str = "") -> dict:
    """Build one manifest entry (shape from the file header, fresh checksum)."""
    n, d = _read_header_shape(path)
    return {
        "embedding_file": str(path),
        "count": n,
        "dim": d,
        "model_tag": model_tag,
        "checksum": checksum_file(path),
    }


def write_manifest(entries: list[dict], path: str | Path) -> None:
    """Write a manifest JSON document with stable key order."""
    doc = {"entries": entries}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def read_manifest(path: str | Path) -> list[dict]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = doc.get("entries")
    if not isinstance(entries, list):
        raise InvalidData(f"{path}: manifest has no 'entries' list")
    return entries


def validate_manifest(path: str | Path) -> list[str]:
    """Check every entry against its file; returns a list of problems.

    An empty list means the manifest is consistent. Paths in the manifest are
    resolved relative to the manifest's directory when not absolute.
    """
    base = Path(path).parent
    problems = []
    for entry in read_manifest(path):
        fname = entry.get("embedding_file", "")
        fpath = Path(fname)
        if not fpath.is_absolute():
            fpath = base / fpath
        if not fpath.exists():
            problems.append(f"{fname}: file missing")
            continue
        try:
            n, d = _read_header_shape(fpath)
        except (NotNpy, ShapeError) as exc:
            problems.append(f"{fname}: {exc}")
            continue
        if n != entry.get("count"):
            problems.append(f"{fname}: row count {n} != manifest count {entry.get('count')}")
        if d != entry.get("dim"):
            problems.append(f"{fname}: dim {d} != manifest dim {entry.get('dim')}")
        actual = checksum_file(fpath)
        if actual != entry.get("checksum"):
            problems.append(f"{fname}: checksum {actual} != manifest {entry.get('checksum')}")
    return problems
