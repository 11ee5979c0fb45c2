"""Log-mel frontend for models that take (100, 128) spectrogram input.

This is the model-side input prep: 25 ms Hann frames at a 10 ms hop,
512-point FFT, 128 HTK-mel triangles over 0-8000 Hz, log(1e-6 + m).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

SAMPLE_RATE = 16000
N_FRAMES = 100
FRAME = 400
HOP = 160
NFFT = 512
N_MELS = 128


def _hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def _mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@lru_cache(maxsize=1)
def _filterbank() -> np.ndarray:
    edges = _mel_to_hz(np.linspace(0.0, float(_hz_to_mel(8000.0)), N_MELS + 2))
    bins = np.arange(NFFT // 2 + 1) * (SAMPLE_RATE / NFFT)
    fb = np.zeros((N_MELS, len(bins)))
    for m in range(N_MELS):
        lo, c, hi = edges[m], edges[m + 1], edges[m + 2]
        rising = (bins - lo) / (c - lo)
        falling = (hi - bins) / (hi - c)
        fb[m] = np.clip(np.minimum(rising, falling), 0.0, None)
    sums = fb.sum(axis=1, keepdims=True)
    sums[sums == 0.0] = 1.0  # narrow low-frequency triangles may miss all bins
    return fb / sums


def mel_100x128(window: np.ndarray) -> np.ndarray:
    """One second of audio -> (100, 128) log-mel features."""
    x = np.asarray(window, dtype=np.float64)
    pad = (N_FRAMES - 1) * HOP + FRAME - len(x)
    if pad > 0:
        x = np.pad(x, (0, pad))
    idx = np.arange(FRAME)[None, :] + HOP * np.arange(N_FRAMES)[:, None]
    frames = x[idx] * np.hanning(FRAME)[None, :]
    mag = np.abs(np.fft.rfft(frames, n=NFFT, axis=1))
    return np.log(1e-6 + mag @ _filterbank().T).astype(np.float32)
