"""Minimal WAV intake for the extractor: 16 kHz / 16-bit / mono only.

Intentionally independent of the detection pipeline's audio code: the
adapter talks to that tool purely through files.
"""

from __future__ import annotations

import wave
from pathlib import Path

import numpy as np

from .errors import BadAudio

SAMPLE_RATE = 16000


def read_wav_seconds(path: str | Path) -> np.ndarray:
    """(n_seconds, 16000) float32 windows; trailing partial second dropped."""
    path = Path(path)
    try:
        with wave.open(str(path), "rb") as w:
            if w.getnchannels() != 1 or w.getsampwidth() != 2 \
                    or w.getcomptype() != "NONE":
                raise BadAudio(f"{path.name}: need 16-bit mono PCM")
            if w.getframerate() != SAMPLE_RATE:
                raise BadAudio(f"{path.name}: need {SAMPLE_RATE} Hz, "
                               f"got {w.getframerate()}")
            raw = w.readframes(w.getnframes())
    except wave.Error as exc:
        raise BadAudio(f"{path.name}: {exc}") from exc
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float32) / 32768.0
    n = len(samples) // SAMPLE_RATE
    return samples[: n * SAMPLE_RATE].reshape(n, SAMPLE_RATE)
