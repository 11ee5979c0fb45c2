"""Per-second spectral features: 64-bin FFT frames and 128-bin log-mels.

Two fixed layouts, both computed from one-second 16 kHz windows:

* ``fft64x20``  — 50 ms frames with 50 ms hop (20 frames/s). Each frame is
  Hann-windowed, zero-padded to a 1024-point FFT, and the 513 magnitude bins
  are mean-pooled into 64 equal contiguous bands (the last band absorbs the
  remainder).
* ``mel128x100`` — 25 ms frames with 10 ms hop (100 frames/s), 512-point FFT,
  128 triangular HTK-mel bands spanning 0-8000 Hz applied to the magnitude
  spectrum. Frames that run past the end of the window read zeros.

Both are log-compressed as log(1e-6 + m); the 1e-6 floor keeps silence
finite. No per-utterance normalization is applied.

Mel filter weights are obtained by integrating each triangle over the width
of every FFT bin and normalizing each filter to unit weight sum. At this FFT
size plain bin-center sampling would leave the narrowest low-frequency
triangles with no bins at all; integration keeps every band non-empty and
makes flat spectra map to flat band energies.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .audio_io import InstanceWindow, TARGET_SAMPLE_RATE
from .errors import WrongSampleRate

FFT_KIND = "fft64x20"
MEL_KIND = "mel128x100"

LOG_FLOOR = 1e-6

# fft64x20 layout
_FFT_FRAME = 800   # 50 ms at 16 kHz
_FFT_HOP = 800
_FFT_NFFT = 1024
_FFT_BANDS = 64

# mel128x100 layout
_MEL_FRAME = 400   # 25 ms
_MEL_HOP = 160     # 10 ms => 100 frames/s
_MEL_NFFT = 512
_MEL_BANDS = 128
_MEL_FMAX = 8000.0


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray  # (frames, bins)
    frame_hop_ms: float
    kind: str

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def _as_window_samples(window: InstanceWindow | np.ndarray) -> np.ndarray:
    samples = window.samples if isinstance(window, InstanceWindow) else window
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or len(x) != TARGET_SAMPLE_RATE:
        raise WrongSampleRate(
            f"expected a one-second window of {TARGET_SAMPLE_RATE} samples, got {x.shape}")
    return x


def _stft_magnitude(x: np.ndarray, frame: int, hop: int, nfft: int,
                    n_frames: int) -> np.ndarray:
    """|STFT| with fixed frame count; frames past the end read zeros."""
    needed = (n_frames - 1) * hop + frame
    if needed > len(x):
        x = np.pad(x, (0, needed - len(x)))
    idx = np.arange(frame)[None, :] + hop * np.arange(n_frames)[:, None]
    frames = x[idx] * np.hanning(frame)[None, :]
    return np.abs(np.fft.rfft(frames, n=nfft, axis=1))


def fft_features(window: InstanceWindow | np.ndarray) -> FeatureMatrix:
    """(20, 64) log-magnitude features from 50 ms frames."""
    x = _as_window_samples(window)
    mag = _stft_magnitude(x, _FFT_FRAME, _FFT_HOP, _FFT_NFFT, n_frames=20)
    n_bins = mag.shape[1]                       # 513
    width = n_bins // _FFT_BANDS                # 8 bins per band
    bands = np.empty((mag.shape[0], _FFT_BANDS))
    for b in range(_FFT_BANDS):
        hi = (b + 1) * width if b < _FFT_BANDS - 1 else n_bins
        bands[:, b] = mag[:, b * width:hi].mean(axis=1)
    return FeatureMatrix(values=np.log(LOG_FLOOR + bands), frame_hop_ms=50.0,
                         kind=FFT_KIND)


def fft_band_of_frequency(freq_hz: float) -> int:
    """Index of the fft64x20 band containing a frequency (used by oracles)."""
    bin_width = TARGET_SAMPLE_RATE / _FFT_NFFT
    b = int(freq_hz / bin_width) // (513 // _FFT_BANDS)
    return min(b, _FFT_BANDS - 1)


def _hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def _mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def _triangle_integral(lo: float, c: float, hi: float, a: float, b: float) -> float:
    """Integral of the (lo, c, hi) unit triangle over the interval [a, b]."""
    total = 0.0
    ra, rb = max(a, lo), min(b, c)
    if rb > ra:  # rising edge
        total += ((rb - lo) ** 2 - (ra - lo) ** 2) / (2.0 * (c - lo))
    fa, fb = max(a, c), min(b, hi)
    if fb > fa:  # falling edge
        total += ((hi - fa) ** 2 - (hi - fb) ** 2) / (2.0 * (hi - c))
    return total


@lru_cache(maxsize=4)
def _mel_filterbank(n_bands: int, nfft: int, sr: int, fmax: float) -> np.ndarray:
    """(n_bands, nfft//2+1) filterbank, each row normalized to unit sum."""
    edges_hz = _mel_to_hz(np.linspace(0.0, float(_hz_to_mel(fmax)), n_bands + 2))
    n_bins = nfft // 2 + 1
    bin_width = sr / nfft
    fb = np.zeros((n_bands, n_bins))
    for m in range(n_bands):
        lo, c, hi = edges_hz[m], edges_hz[m + 1], edges_hz[m + 2]
        for i in range(n_bins):
            a = max(0.0, i * bin_width - bin_width / 2.0)
            b = i * bin_width + bin_width / 2.0
            fb[m, i] = _triangle_integral(lo, c, hi, a, b)
    fb /= fb.sum(axis=1, keepdims=True)
    return fb


def mel_spectrogram(window: InstanceWindow | np.ndarray) -> FeatureMatrix:
    """(100, 128) log-mel features from 25 ms frames at a 10 ms hop."""
    x = _as_window_samples(window)
    mag = _stft_magnitude(x, _MEL_FRAME, _MEL_HOP, _MEL_NFFT, n_frames=100)
    fb = _mel_filterbank(_MEL_BANDS, _MEL_NFFT, TARGET_SAMPLE_RATE, _MEL_FMAX)
    bands = mag @ fb.T
    return FeatureMatrix(values=np.log(LOG_FLOOR + bands), frame_hop_ms=10.0,
                         kind=MEL_KIND)


def extract_features(window: InstanceWindow | np.ndarray, kind: str) -> FeatureMatrix:
    if kind == FFT_KIND:
        return fft_features(window)
    if kind == MEL_KIND:
        return mel_spectrogram(window)
    raise ValueError(f"unknown feature kind: {kind!r}")
