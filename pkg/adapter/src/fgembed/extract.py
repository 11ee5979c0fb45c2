"""Batch extraction: WAV directory -> one embedding row per second."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .audio import read_wav_seconds
from .errors import BadAudio, DimMismatch
from .mel import mel_100x128
from .models import (GENERAL_PURPOSE_ID, MEL_128x100, ExtractorSpec, ModelFn,
                     load_model, resolve_spec)
from .store_writer import write_store


def _model_inputs(windows: np.ndarray, input_kind: str) -> np.ndarray:
    if input_kind == MEL_128x100:
        return np.stack([mel_100x128(w) for w in windows])
    return windows.astype(np.float32)


def extract(wav_dir: str | Path, extractor: ExtractorSpec, out_store: str | Path,
            model: ModelFn | None = None, model_path: str | None = None,
            group_id: str = "g00", session: str = "ChatIndoors",
            batch_size: int = 64) -> Path:
    """Embed every whole second of every WAV in lexicographic file order."""
    wavs = sorted(Path(wav_dir).glob("*.wav"), key=lambda p: p.name)
    if not wavs:
        raise BadAudio(f"no WAV files in {wav_dir}")
    if model is None:
        model = load_model(extractor, model_path=model_path)

    blocks: list[np.ndarray] = []
    for path in wavs:
        windows = read_wav_seconds(path)
        for start in range(0, len(windows), batch_size):
            batch = _model_inputs(windows[start:start + batch_size],
                                  extractor.input_kind)
            if len(batch):
                blocks.append(model(batch))
    if not blocks:
        raise BadAudio("no whole seconds found in input WAVs")
    matrix = np.concatenate(blocks, axis=0)
    if extractor.expected_dim is not None and matrix.shape[1] != extractor.expected_dim:
        raise DimMismatch(
            f"{extractor.model_id}: model emits {matrix.shape[1]}-d embeddings, "
            f"expected {extractor.expected_dim}")
    return write_store(matrix, kind=extractor.model_id, path=out_store,
                       group_id=group_id, session=session)


def extract_general(wav_dir: str | Path, out_store: str | Path,
                    **kwargs) -> Path:
    """General-purpose audio embeddings for the negative-control experiment."""
    return extract(wav_dir, resolve_spec(GENERAL_PURPOSE_ID), out_store, **kwargs)
