"""Overlay clean speech with household noise at fixed SNR targets.

SNR is measured as full-utterance mean square power (no voice-activity
gating), so a target is reproducible from the stored constituents alone.
Clipping after summation is handled by whole-utterance peak normalization,
which rescales both constituents equally and therefore preserves the ratio.
"""

from __future__ import annotations

import csv
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio_io import AudioClip, load_wav, write_wav
from .errors import EmptyCorpus, SampleRateMismatch, ZeroPowerSignal

MANIFEST_HEADER = ["clean", "noise", "snr_db", "offset_samples", "gain"]


@dataclass(frozen=True)
class NoiseClip:
    clip: AudioClip
    label: str

    def __post_init__(self):
        if self.duration_s < 1.0:
            raise ValueError(
                f"noise clip {self.label!r} is {self.duration_s:.3f}s; need >= 1s")

    @property
    def duration_s(self) -> float:
        return self.clip.duration_s


def noise_clip_from_wav(path: str | Path) -> NoiseClip:
    path = Path(path)
    return NoiseClip(clip=load_wav(path), label=path.stem)


def _mean_square(x: np.ndarray) -> float:
    return float(np.mean(np.square(x, dtype=np.float64)))


def noise_segment(noise: np.ndarray, offset: int, length: int) -> np.ndarray:
    """Circular slice: noise shorter than the utterance wraps around."""
    idx = (offset + np.arange(length)) % len(noise)
    return noise[idx]


def snr_gain(clean: np.ndarray, noise_segment: np.ndarray, snr_db: float) -> float:
    """Scale for the noise so 10*log10(P_clean / P_scaled_noise) == snr_db."""
    p_clean = _mean_square(clean)
    p_noise = _mean_square(noise_segment)
    if p_clean <= 0.0:
        raise ZeroPowerSignal("clean signal is silent")
    if p_noise <= 0.0:
        raise ZeroPowerSignal("noise segment is silent")
    return float(np.sqrt(p_clean / (p_noise * 10.0 ** (snr_db / 10.0))))


def _mix(clean: np.ndarray, noise: np.ndarray, snr_db: float,
         offset: int) -> tuple[np.ndarray, float]:
    seg = noise_segment(noise, offset, len(clean))
    gain = snr_gain(clean, seg, snr_db)
    mixed = clean.astype(np.float64) + gain * seg.astype(np.float64)
    peak = float(np.max(np.abs(mixed)))
    if peak > 1.0:
        mixed /= peak
    return mixed.astype(np.float32), gain


def mix_at_snr(clean: AudioClip, noise: NoiseClip, snr_db: float,
               offset_seed: int) -> AudioClip:
    """Mix noise into clean speech at a target SNR.

    The noise start offset is drawn from a seeded RNG and the noise is
    looped/truncated to the clean length. Output length always equals the
    clean length.
    """
    if clean.sample_rate != noise.clip.sample_rate:
        raise SampleRateMismatch(
            f"clean at {clean.sample_rate} Hz, noise at {noise.clip.sample_rate} Hz")
    rng = np.random.default_rng(offset_seed)
    offset = int(rng.integers(0, len(noise.clip.samples)))
    mixed, _ = _mix(clean.samples, noise.clip.samples, snr_db, offset)
    return AudioClip(samples=mixed, sample_rate=clean.sample_rate,
                     source_id=f"{clean.source_id}+{noise.label}@{snr_db:g}dB")


def _file_seed(seed: int, filename: str) -> int:
    # crc32 rather than hash(): stable across processes and runs
    return (seed ^ zlib.crc32(filename.encode("utf-8"))) & 0xFFFFFFFF


def augment_corpus(clean_dir: str | Path, noise_dir: str | Path,
                   snr_levels: list[float], seed: int, out_dir: str | Path,
                   copies: int = 1, threads: int = 1) -> list[dict]:
    """Mix every clean utterance with seeded noise at every SNR level.

    Produces len(clean) * len(snr_levels) * copies output WAVs plus a
    manifest CSV recording (clean, noise, snr_db, offset_samples, gain).
    Per-file seeds are derived from the corpus seed and the clean filename,
    so outputs are identical whatever the thread count or schedule.
    """
    clean_paths = sorted(Path(clean_dir).glob("*.wav"))
    noise_paths = sorted(Path(noise_dir).glob("*.wav"))
    if not clean_paths:
        raise EmptyCorpus(f"no WAV files in {clean_dir}")
    if not noise_paths:
        raise EmptyCorpus(f"no WAV files in {noise_dir}")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    noises = [noise_clip_from_wav(p) for p in noise_paths]

    def mix_one_clean(clean_path: Path) -> list[dict]:
        clean = load_wav(clean_path)
        rng = np.random.default_rng(_file_seed(seed, clean_path.name))
        file_rows = []
        for snr_db in snr_levels:
            for copy in range(copies):
                ni = int(rng.integers(0, len(noises)))
                noise = noises[ni]
                if clean.sample_rate != noise.clip.sample_rate:
                    raise SampleRateMismatch(
                        f"{clean_path.name} at {clean.sample_rate} Hz, "
                        f"{noise.label} at {noise.clip.sample_rate} Hz")
                offset = int(rng.integers(0, len(noise.clip.samples)))
                mixed, gain = _mix(clean.samples, noise.clip.samples, snr_db, offset)
                out_name = f"{clean_path.stem}__snr{snr_db:g}__c{copy}.wav"
                write_wav(AudioClip(mixed, clean.sample_rate, out_name),
                          out_dir / out_name)
                file_rows.append({
                    "clean": clean_path.name,
                    "noise": noise_paths[ni].name,
                    "snr_db": f"{snr_db:g}",
                    "offset_samples": str(offset),
                    "gain": f"{gain:.17g}",
                })
        return file_rows

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_file = list(pool.map(mix_one_clean, clean_paths))
    else:
        per_file = [mix_one_clean(p) for p in clean_paths]
    rows = [row for file_rows in per_file for row in file_rows]

    with open(out_dir / "manifest.csv", "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=MANIFEST_HEADER)
        writer.writeheader()
        writer.writerows(rows)
    return rows
