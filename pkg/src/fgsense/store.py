"""Embedding store: label taxonomy, cosine kernels, FGEB on-disk format.

The binary layout is fixed so stores are portable across tools:
magic ``FGEB``, u32 version (=1), u32 N, u32 D, then N*D float32
little-endian row-major. A sidecar JSON manifest carries the embedding kind
and one record per row; the fg/bg projection of each fine label is
recomputed (never trusted) on load.
"""

from __future__ import annotations

import csv
import enum
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CorruptStore, DimensionMismatch, ManifestMismatch

MAGIC = b"FGEB"
VERSION = 1

# kinds with a pinned dimensionality; anything else is free-form
KNOWN_KIND_DIMS = {"emb1": 512, "emb2": 1000}


class FineLabel(enum.Enum):
    WearerSpeech = "WearerSpeech"
    NonWearerSpeech = "NonWearerSpeech"
    TelephoneVoice = "TelephoneVoice"
    Television = "Television"
    MixedSpeech = "MixedSpeech"
    BabySounds = "BabySounds"
    NonVocalNoise = "NonVocalNoise"
    AmbiguousSounds = "AmbiguousSounds"


class BinaryLabel(enum.Enum):
    Foreground = "Foreground"
    Background = "Background"


class Session(enum.Enum):
    TelephoneCall = "TelephoneCall"
    WatchTV = "WatchTV"
    ChatIndoors = "ChatIndoors"
    ChatOutdoors = "ChatOutdoors"
    Meal = "Meal"


_FOREGROUND_FINE = frozenset({FineLabel.WearerSpeech, FineLabel.MixedSpeech})


def project_binary(fine: FineLabel) -> BinaryLabel:
    """Wearer speech and mixed speech are foreground; everything else is background."""
    if fine in _FOREGROUND_FINE:
        return BinaryLabel.Foreground
    return BinaryLabel.Background


@dataclass(frozen=True)
class InstanceRecord:
    index: int
    group_id: str
    session: Session
    fine_label: FineLabel
    binary_label: BinaryLabel = field(init=False)

    def __post_init__(self):
        # derived, never stored authoritatively
        object.__setattr__(self, "binary_label", project_binary(self.fine_label))


@dataclass
class Store:
    """Embedding matrix (one row per one-second instance) plus its records."""

    matrix: np.ndarray  # (N, D) float32
    records: list[InstanceRecord]
    kind: str = "unknown"

    @property
    def n_instances(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def binary_labels(self) -> list[BinaryLabel]:
        return [r.binary_label for r in self.records]

    def group_ids(self) -> list[str]:
        return [r.group_id for r in self.records]


# ---------------------------------------------------------------------------
# cosine kernels
# ---------------------------------------------------------------------------

ZERO_NORM_EPS = 1e-12


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two vectors, 0 if either is (near) zero."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na < ZERO_NORM_EPS or nb < ZERO_NORM_EPS:
        return 0.0
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def normalize_rows(matrix: np.ndarray) -> np.ndarray:
    """L2-normalize rows; rows with (near) zero norm are left at zero."""
    x = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    safe = np.where(norms < ZERO_NORM_EPS, 1.0, norms)
    out = x / safe
    out[norms[:, 0] < ZERO_NORM_EPS] = 0.0
    return out


def pairwise_similarity(matrix: np.ndarray) -> np.ndarray:
    """N x N cosine similarity, exactly symmetric (computed once, mirrored)."""
    x = normalize_rows(matrix)
    gram = x @ x.T
    upper = np.triu(gram, k=1)
    sim = upper + upper.T
    nonzero = np.linalg.norm(np.asarray(matrix, dtype=np.float64), axis=1) >= ZERO_NORM_EPS
    np.fill_diagonal(sim, np.where(nonzero, 1.0, 0.0))
    return np.clip(sim, -1.0, 1.0)


# ---------------------------------------------------------------------------
# FGEB read/write
# ---------------------------------------------------------------------------


def store_paths(path: str | Path) -> tuple[Path, Path]:
    """(binary path, manifest path) for a store prefix or .fgeb path."""
    path = Path(path)
    if path.suffix != ".fgeb":
        path = path.parent / (path.name + ".fgeb")
    manifest = path.parent / (path.name[:-len(".fgeb")] + ".manifest.json")
    return path, manifest


def write_store(store: Store, path: str | Path) -> Path:
    binary_path, manifest_path = store_paths(path)
    matrix = np.ascontiguousarray(store.matrix, dtype="<f4")
    if matrix.ndim != 2:
        raise ValueError(f"matrix must be 2-D, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("matrix contains non-finite values")
    n, d = matrix.shape
    if len(store.records) != n:
        raise ManifestMismatch(f"{len(store.records)} records for {n} rows")
    expected = KNOWN_KIND_DIMS.get(store.kind)
    if expected is not None and d != expected:
        raise ManifestMismatch(f"kind {store.kind!r} requires D={expected}, got {d}")

    with open(binary_path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<III", VERSION, n, d))
        f.write(matrix.tobytes())

    manifest = {
        "embedding_kind": store.kind,
        "records": [
            {
                "index": r.index,
                "group_id": r.group_id,
                "session": r.session.value,
                "fine_label": r.fine_label.value,
            }
            for r in store.records
        ],
    }
    with open(manifest_path, "w") as f:
        json.dump(manifest, f, indent=1)
    return binary_path


def _parse_record(i: int, raw: dict) -> InstanceRecord:
    try:
        record = InstanceRecord(
            index=int(raw["index"]),
            group_id=str(raw["group_id"]),
            session=Session(raw["session"]),
            fine_label=FineLabel(raw["fine_label"]),
        )
    except (KeyError, ValueError) as exc:
        raise ManifestMismatch(f"record {i}: {exc}") from exc
    if record.index != i:
        raise ManifestMismatch(f"record {i} carries index {record.index}")
    stored_binary = raw.get("binary_label")
    if stored_binary is not None and stored_binary != record.binary_label.value:
        raise ManifestMismatch(
            f"record {i}: stored binary label {stored_binary!r} contradicts "
            f"projection {record.binary_label.value!r}")
    return record


def read_store(path: str | Path) -> Store:
    binary_path, manifest_path = store_paths(path)
    with open(binary_path, "rb") as f:
        blob = f.read()
    if len(blob) < 16 or blob[:4] != MAGIC:
        raise CorruptStore(f"{binary_path.name}: bad magic")
    version, n, d = struct.unpack("<III", blob[4:16])
    if version != VERSION:
        raise CorruptStore(f"{binary_path.name}: unsupported version {version}")
    expected_size = 16 + 4 * n * d
    if len(blob) != expected_size:
        raise CorruptStore(
            f"{binary_path.name}: size {len(blob)} != expected {expected_size}")
    matrix = np.frombuffer(blob[16:], dtype="<f4").reshape(n, d).copy()
    if not np.all(np.isfinite(matrix)):
        raise CorruptStore(f"{binary_path.name}: non-finite values")

    if not manifest_path.exists():
        raise ManifestMismatch(f"missing manifest {manifest_path.name}")
    with open(manifest_path) as f:
        try:
            manifest = json.load(f)
        except json.JSONDecodeError as exc:
            raise ManifestMismatch(f"{manifest_path.name}: invalid JSON") from exc
    kind = manifest.get("embedding_kind", "unknown")
    raw_records = manifest.get("records", [])
    if len(raw_records) != n:
        raise ManifestMismatch(
            f"{len(raw_records)} manifest records for {n} matrix rows")
    expected_dim = KNOWN_KIND_DIMS.get(kind)
    if expected_dim is not None and d != expected_dim:
        raise ManifestMismatch(f"kind {kind!r} requires D={expected_dim}, got {d}")
    records = [_parse_record(i, raw) for i, raw in enumerate(raw_records)]
    return Store(matrix=matrix, records=records, kind=kind)


# ---------------------------------------------------------------------------
# CSV label export
# ---------------------------------------------------------------------------

LABELS_HEADER = ["index", "group_id", "session", "fine_label", "binary_label"]


def write_labels_csv(records: Sequence[InstanceRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(LABELS_HEADER)
        for r in records:
            writer.writerow([r.index, r.group_id, r.session.value,
                             r.fine_label.value, r.binary_label.value])


def read_labels_csv(path: str | Path) -> list[InstanceRecord]:
    records = []
    with open(path, newline="") as f:
        for i, row in enumerate(csv.DictReader(f)):
            records.append(_parse_record(i, row))
    return records
