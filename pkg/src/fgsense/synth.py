"""Deterministic synthetic data for desk-scale verification.

Embedding generator
-------------------
Two regimes, both with known ground truth:

* ``null_bg`` (default) — matches the empirical regime the labeling rule
  assumes: background seconds form a tight cloud around a single null-like
  prototype (high within-cluster similarity), foreground seconds spread
  over several speaker prototypes anchored to a shared voice axis (lower
  within-cluster similarity).
* ``isotropic_bg`` — foreground is concentrated near its prototypes while the
  background is isotropic on the unit sphere. Here the foreground cluster
  is the tighter one, so the labeling rule is expected to flip; tests use
  this mode to pin down where the rule's assumption matters.

The null direction and voice axis are drawn from a fixed internal stream
(not the config seed) so stores generated with different seeds share the
same macro-geometry, the way one pretrained extractor imposes a common
embedding space on every group. All other randomness is split per instance
from the config seed, so any row is reproducible independent of generation
order.

Audio generator
---------------
One-second 16 kHz clips: sine tones (foreground surrogate) at frequencies
chosen to sit well inside an fft64x20 band, and white-noise clips
(background surrogate).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio_io import AudioClip, TARGET_SAMPLE_RATE
from .errors import InvalidConfig
from .store import BinaryLabel, FineLabel, InstanceRecord, Session, Store

_GEOMETRY_SEED = 0x0F65E17  # extractor-level constants, shared across seeds

# sub-streams of the config seed
_PROTO = 0
_INSTANCE = 1
_LABEL = 2
_TONE = 3

_BG_CLASS_WEIGHTS = {
    FineLabel.NonVocalNoise: 36_801,
    FineLabel.Television: 21_131,
    FineLabel.NonWearerSpeech: 13_041,
    FineLabel.TelephoneVoice: 1_903,
    FineLabel.AmbiguousSounds: 1_146,
    FineLabel.BabySounds: 688,
}
# share of mixed speech within foreground, from the corpus distribution
_P_MIXED = 2_600 / (19_461 + 2_600)


@dataclass(frozen=True)
class SynthConfig:
    n_instances: int
    dim: int = 64
    fg_fraction: float = 0.235  # corpus-level foreground share
    n_prototypes: int = 3
    fg_noise_sigma: float = 0.05
    seed: int = 0
    mode: str = "null_bg"  # or "isotropic_bg"
    bg_noise_sigma: float | None = None  # default: fg_noise_sigma / 2
    proto_spread: float = 0.5
    group_id: str = "g00"

    def validate(self) -> "SynthConfig":
        if self.n_instances < 4:
            raise InvalidConfig(f"n_instances must be >= 4, got {self.n_instances}")
        if self.dim < 2:
            raise InvalidConfig(f"dim must be >= 2, got {self.dim}")
        if not 0.0 < self.fg_fraction < 1.0:
            raise InvalidConfig(f"fg_fraction must be in (0, 1), got {self.fg_fraction}")
        if self.n_prototypes < 1:
            raise InvalidConfig("n_prototypes must be >= 1")
        if self.fg_noise_sigma < 0 or (self.bg_noise_sigma or 0) < 0:
            raise InvalidConfig("noise sigmas must be >= 0")
        if self.mode not in ("null_bg", "isotropic_bg"):
            raise InvalidConfig(f"unknown mode {self.mode!r}")
        return self

    @property
    def effective_bg_sigma(self) -> float:
        return self.bg_noise_sigma if self.bg_noise_sigma is not None \
            else self.fg_noise_sigma / 2.0


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _extractor_geometry(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """(null direction, voice axis), orthonormal, fixed per dimension."""
    rng = np.random.default_rng([_GEOMETRY_SEED, dim])
    null_dir = _unit(rng.standard_normal(dim))
    v = rng.standard_normal(dim)
    v -= (v @ null_dir) * null_dir
    return null_dir, _unit(v)


def _prototypes(config: SynthConfig, voice_axis: np.ndarray) -> np.ndarray:
    protos = np.empty((config.n_prototypes, config.dim))
    for j in range(config.n_prototypes):
        rng = np.random.default_rng([config.seed, _PROTO, j])
        w = _unit(rng.standard_normal(config.dim))
        if config.mode == "null_bg":
            protos[j] = _unit(voice_axis + config.proto_spread * w)
        else:
            protos[j] = w
    return protos


def generate_embeddings(config: SynthConfig) -> Store:
    """Synthetic store with ground-truth labels; deterministic in the seed."""
    config.validate()
    n = config.n_instances
    n_fg = min(max(int(round(n * config.fg_fraction)), 1), n - 1)

    null_dir, voice_axis = _extractor_geometry(config.dim)
    protos = _prototypes(config, voice_axis)

    matrix = np.empty((n, config.dim))
    records = []
    sessions = list(Session)
    bg_classes = list(_BG_CLASS_WEIGHTS)
    bg_weights = np.array([_BG_CLASS_WEIGHTS[c] for c in bg_classes], dtype=np.float64)
    bg_weights /= bg_weights.sum()

    for i in range(n):
        rng = np.random.default_rng([config.seed, _INSTANCE, i])
        label_rng = np.random.default_rng([config.seed, _LABEL, i])
        is_fg = i < n_fg
        if is_fg:
            proto = protos[int(rng.integers(config.n_prototypes))]
            x = proto + config.fg_noise_sigma * rng.standard_normal(config.dim)
            fine = FineLabel.MixedSpeech if label_rng.random() < _P_MIXED \
                else FineLabel.WearerSpeech
        else:
            if config.mode == "null_bg":
                x = null_dir + config.effective_bg_sigma * rng.standard_normal(config.dim)
            else:
                x = rng.standard_normal(config.dim)
            fine = bg_classes[int(label_rng.choice(len(bg_classes), p=bg_weights))]
        matrix[i] = _unit(x)
        records.append(InstanceRecord(
            index=i,
            group_id=config.group_id,
            session=sessions[int(label_rng.integers(len(sessions)))],
            fine_label=fine,
        ))

    return Store(matrix=matrix.astype(np.float32), records=records, kind="synthetic")


# ---------------------------------------------------------------------------
# synthetic audio
# ---------------------------------------------------------------------------

_FFT_BIN_HZ = TARGET_SAMPLE_RATE / 1024.0  # fft64x20 analysis grid
_BAND_BINS = 8


def safe_tone_frequencies(lo_hz: float = 200.0, hi_hz: float = 6000.0) -> np.ndarray:
    """Whole-cycle tone frequencies that sit >= 2 FFT bins inside a band.

    Keeps the band-argmax of a tone unambiguous despite spectral leakage.
    """
    m = np.arange(int(lo_hz / 20.0), int(hi_hz / 20.0) + 1)
    freqs = 20.0 * m  # integer cycles per 800-sample frame
    pos_in_band = (freqs / _FFT_BIN_HZ) % _BAND_BINS
    return freqs[(pos_in_band >= 2.0) & (pos_in_band <= 6.0)]


def generate_tone_corpus(n: int, seed: int) -> tuple[list[AudioClip], list[BinaryLabel]]:
    """n one-second clips alternating tone (fg surrogate) / noise (bg)."""
    if n < 2:
        raise InvalidConfig(f"need at least 2 clips, got {n}")
    freqs = safe_tone_frequencies()
    t = np.arange(TARGET_SAMPLE_RATE) / TARGET_SAMPLE_RATE
    clips = []
    labels = []
    for i in range(n):
        rng = np.random.default_rng([seed, _TONE, i])
        if i % 2 == 0:
            f = float(freqs[int(rng.integers(len(freqs)))])
            phase = float(rng.uniform(0.0, 2.0 * np.pi))
            samples = 0.5 * np.sin(2.0 * np.pi * f * t + phase)
            clips.append(AudioClip(samples=samples.astype(np.float32),
                                   sample_rate=TARGET_SAMPLE_RATE,
                                   source_id=f"tone{i:03d}_{f:g}hz"))
            labels.append(BinaryLabel.Foreground)
        else:
            samples = np.clip(0.1 * rng.standard_normal(TARGET_SAMPLE_RATE), -1.0, 1.0)
            clips.append(AudioClip(samples=samples.astype(np.float32),
                                   sample_rate=TARGET_SAMPLE_RATE,
                                   source_id=f"noise{i:03d}"))
            labels.append(BinaryLabel.Background)
    return clips, labels
