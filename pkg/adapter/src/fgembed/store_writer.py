"""FGEB store writer: the wire format consumed by the detection pipeline.

Layout: magic ``FGEB``, u32 version (=1), u32 N, u32 D, N*D float32
little-endian row-major, plus a ``<name>.manifest.json`` sidecar with
``embedding_kind`` and one record per row.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"FGEB"
VERSION = 1

SESSIONS = ("TelephoneCall", "WatchTV", "ChatIndoors", "ChatOutdoors", "Meal")
UNLABELED_FINE = "AmbiguousSounds"


def store_paths(path: str | Path) -> tuple[Path, Path]:
    path = Path(path)
    if path.suffix != ".fgeb":
        path = path.parent / (path.name + ".fgeb")
    return path, path.parent / (path.name[: -len(".fgeb")] + ".manifest.json")


def write_store(matrix: np.ndarray, kind: str, path: str | Path,
                group_id: str = "g00", session: str = "ChatIndoors",
                fine_labels: list[str] | None = None) -> Path:
    if session not in SESSIONS:
        raise ValueError(f"unknown session {session!r}")
    matrix = np.ascontiguousarray(matrix, dtype="<f4")
    if matrix.ndim != 2:
        raise ValueError(f"matrix must be 2-D, got {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("matrix contains non-finite values")
    n, d = matrix.shape
    if fine_labels is None:
        fine_labels = [UNLABELED_FINE] * n
    if len(fine_labels) != n:
        raise ValueError(f"{len(fine_labels)} labels for {n} rows")

    binary_path, manifest_path = store_paths(path)
    with open(binary_path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<III", VERSION, n, d))
        f.write(matrix.tobytes())
    manifest = {
        "embedding_kind": kind,
        "records": [
            {"index": i, "group_id": group_id, "session": session,
             "fine_label": fine_labels[i]}
            for i in range(n)
        ],
    }
    with open(manifest_path, "w") as f:
        json.dump(manifest, f, indent=1)
    return binary_path
