"""Extractor registry: pretrained models wrapped behind one batch interface.

Models are referenced by id (or a ``torchscript:<path>`` id for local
checkpoints) and never vendored. Every wrapped model maps a batch of inputs
to an (N, D) float32 array; loading anything that is not available locally
raises ModelLoadFailure instead of downloading.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DimMismatch, ModelLoadFailure

RAW_WAVEFORM = "raw_waveform"
MEL_128x100 = "mel_128x100"

TORCHSCRIPT_PREFIX = "torchscript:"

ModelFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ExtractorSpec:
    model_id: str
    expected_dim: int | None  # None: accept whatever the model emits
    input_kind: str


# Speaker extractors (512-d and 1000-d) plus the general-purpose audio
# embedding used as the negative control.
KNOWN_EXTRACTORS = {
    "pyannote-speaker-512": ExtractorSpec("pyannote-speaker-512", 512, RAW_WAVEFORM),
    "timit-household-1000": ExtractorSpec("timit-household-1000", 1000, MEL_128x100),
    "yamnet": ExtractorSpec("yamnet", 1024, RAW_WAVEFORM),
}

GENERAL_PURPOSE_ID = "yamnet"


def resolve_spec(model_id: str, dim: int | None = None,
                 input_kind: str | None = None) -> ExtractorSpec:
    if model_id in KNOWN_EXTRACTORS:
        return KNOWN_EXTRACTORS[model_id]
    if model_id.startswith(TORCHSCRIPT_PREFIX):
        return ExtractorSpec(model_id, dim, input_kind or RAW_WAVEFORM)
    raise ModelLoadFailure(
        f"unknown model id {model_id!r}; known ids: "
        f"{sorted(KNOWN_EXTRACTORS)} or torchscript:<path>")


def _wrap_torch_module(module, model_id: str) -> ModelFn:
    import torch

    module.eval()

    def run(batch: np.ndarray) -> np.ndarray:
        with torch.no_grad():
            out = module(torch.from_numpy(np.ascontiguousarray(batch, dtype=np.float32)))
        out = out.detach().cpu().numpy()
        if out.ndim != 2 or out.shape[0] != batch.shape[0]:
            raise DimMismatch(
                f"{model_id}: expected (batch, dim) output, got {out.shape}")
        return out.astype(np.float32)

    return run


def _load_torchscript(path: str) -> ModelFn:
    import torch

    p = Path(path)
    if not p.is_file():
        raise ModelLoadFailure(f"checkpoint not found: {p}")
    try:
        module = torch.jit.load(str(p), map_location="cpu")
    except Exception as exc:
        raise ModelLoadFailure(f"cannot load TorchScript module {p}: {exc}") from exc
    return _wrap_torch_module(module, f"torchscript:{p}")


def _load_pyannote() -> ModelFn:
    try:
        from pyannote.audio import Model  # type: ignore
    except ImportError as exc:
        raise ModelLoadFailure(
            "pyannote.audio is not installed; install it and fetch the "
            "pretrained speaker embedding model to use this extractor") from exc
    try:
        model = Model.from_pretrained("pyannote/embedding")
    except Exception as exc:
        raise ModelLoadFailure(f"pyannote speaker model unavailable: {exc}") from exc
    return _wrap_torch_module(model, "pyannote-speaker-512")


def _load_yamnet() -> ModelFn:
    try:
        import tensorflow_hub as hub  # type: ignore
    except ImportError as exc:
        raise ModelLoadFailure(
            "tensorflow_hub is not installed; the general-purpose extractor "
            "needs a locally cached YAMNet") from exc
    try:
        model = hub.load("https://tfhub.dev/google/yamnet/1")
    except Exception as exc:
        raise ModelLoadFailure(f"YAMNet unavailable: {exc}") from exc

    def run(batch: np.ndarray) -> np.ndarray:
        rows = []
        for row in batch:  # yamnet scores one waveform at a time
            _, embeddings, _ = model(row.astype(np.float32))
            rows.append(np.asarray(embeddings).mean(axis=0))
        return np.stack(rows).astype(np.float32)

    return run


def load_model(spec: ExtractorSpec, model_path: str | None = None) -> ModelFn:
    """Instantiate the model behind a spec; local checkpoints take priority."""
    if spec.model_id.startswith(TORCHSCRIPT_PREFIX):
        return _load_torchscript(spec.model_id[len(TORCHSCRIPT_PREFIX):])
    if model_path:
        return _load_torchscript(model_path)
    if spec.model_id == "pyannote-speaker-512":
        return _load_pyannote()
    if spec.model_id == "yamnet":
        return _load_yamnet()
    if spec.model_id == "timit-household-1000":
        raise ModelLoadFailure(
            "timit-household-1000 is a study-internal model; pass its local "
            "checkpoint via --model-path")
    raise ModelLoadFailure(f"no loader for {spec.model_id!r}")
