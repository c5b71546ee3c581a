"""Manifest verification: shapes, dims, checksums, finiteness."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .models import SPECS
from .pipeline import checksum_file


def _expected_dim(model_tag: str) -> int | None:
    for name, spec in SPECS.items():
        if model_tag == name or model_tag.startswith(name + "("):
            return spec.dim
    return None


def verify(manifest_path: str | Path) -> tuple[bool, list[str]]:
    """Validate every manifest entry against its file.

    Returns (ok, problems); ok is True exactly when problems is empty.
    Relative embedding paths resolve against the manifest's directory.
    """
    manifest_path = Path(manifest_path)
    problems: list[str] = []
    try:
        doc = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        return False, [f"{manifest_path}: unreadable manifest: {exc}"]
    entries = doc.get("entries")
    if not isinstance(entries, list) or not entries:
        return False, [f"{manifest_path}: manifest has no entries"]

    for entry in entries:
        name = entry.get("embedding_file", "<missing>")
        fpath = Path(name)
        if not fpath.is_absolute():
            fpath = manifest_path.parent / fpath
        if not fpath.exists():
            problems.append(f"{name}: file missing")
            continue

        actual = checksum_file(fpath)
        if actual != entry.get("checksum"):
            problems.append(f"{name}: checksum {actual} != manifest {entry.get('checksum')}")

        try:
            arr = np.load(fpath)
        except ValueError as exc:
            problems.append(f"{name}: not a loadable NPY file: {exc}")
            continue
        if arr.ndim != 2:
            problems.append(f"{name}: expected a 2-D array, got shape {arr.shape}")
            continue
        if arr.shape[0] != entry.get("count"):
            problems.append(f"{name}: row count {arr.shape[0]} != manifest count {entry.get('count')}")
        if arr.shape[1] != entry.get("dim"):
            problems.append(f"{name}: dim {arr.shape[1]} != manifest dim {entry.get('dim')}")
        expected = _expected_dim(str(entry.get("model_tag", "")))
        if expected is not None and arr.shape[1] != expected:
            problems.append(f"{name}: dim {arr.shape[1]} != model's expected dim {expected}")
        if not np.all(np.isfinite(arr)):
            problems.append(f"{name}: contains non-finite values")

    return (len(problems) == 0), problems
