"""Smartwatch-style audio I/O: 16-bit mono PCM WAV at 16 kHz.

The reader parses RIFF chunks directly so format problems map onto a precise
error taxonomy (MalformedWav vs UnsupportedFormat) instead of a generic parse
failure. Files at other sample rates load fine; the pipeline rejects them
later when one-second framing is requested.
"""

from __future__ import annotations

import struct
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import MalformedWav, UnsupportedFormat, WrongSampleRate

TARGET_SAMPLE_RATE = 16000

# -32768 maps to exactly -1.0; keeps the int16 grid exactly representable
# in float32 and makes load(write(clip)) sample-exact.
_INT16_SCALE = 32768.0


@dataclass(frozen=True)
class AudioClip:
    samples: np.ndarray  # float32 mono, every value in [-1.0, 1.0]
    sample_rate: int
    source_id: str = ""

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class InstanceWindow:
    """One labeled second: non-overlapping, contiguous slice of a clip."""

    clip_ref: str
    index: int  # 0-based second offset within the clip
    samples: np.ndarray


def _read_exact(f, n: int) -> bytes:
    data = f.read(n)
    if len(data) != n:
        raise MalformedWav(f"unexpected end of file (wanted {n} bytes, got {len(data)})")
    return data


def load_wav(path: str | Path) -> AudioClip:
    """Load a RIFF/WAVE file that must be PCM, 16-bit, mono."""
    path = Path(path)
    with open(path, "rb") as f:
        header = f.read(12)
        if len(header) < 12 or header[:4] != b"RIFF" or header[8:12] != b"WAVE":
            raise MalformedWav(f"{path.name}: not a RIFF/WAVE file")

        fmt = None
        data = None
        while data is None:
            chunk_header = f.read(8)
            if len(chunk_header) == 0:
                break
            if len(chunk_header) < 8:
                raise MalformedWav(f"{path.name}: truncated chunk header")
            chunk_id, size = struct.unpack("<4sI", chunk_header)
            if chunk_id == b"fmt ":
                if size < 16:
                    raise MalformedWav(f"{path.name}: fmt chunk too short ({size} bytes)")
                body = _read_exact(f, size)
                fmt = struct.unpack("<HHIIHH", body[:16])
            elif chunk_id == b"data":
                data = _read_exact(f, size)
            else:
                f.seek(size + (size & 1), 1)  # skip unknown chunk, pad to even

        if fmt is None:
            raise MalformedWav(f"{path.name}: missing fmt chunk")
        if data is None:
            raise MalformedWav(f"{path.name}: missing data chunk")

    audio_format, channels, sample_rate, _, _, bits = fmt
    if audio_format != 1:
        raise UnsupportedFormat(f"{path.name}: not PCM (format tag {audio_format})")
    if channels != 1:
        raise UnsupportedFormat(f"{path.name}: expected 1 channel, got {channels}")
    if bits != 16:
        raise UnsupportedFormat(f"{path.name}: expected 16-bit samples, got {bits}")
    if sample_rate <= 0:
        raise MalformedWav(f"{path.name}: invalid sample rate {sample_rate}")
    if len(data) % 2 != 0:
        raise MalformedWav(f"{path.name}: odd data chunk size {len(data)}")

    raw = np.frombuffer(data, dtype="<i2")
    samples = (raw.astype(np.float32) / _INT16_SCALE).astype(np.float32)
    return AudioClip(samples=samples, sample_rate=int(sample_rate), source_id=path.stem)


def write_wav(clip: AudioClip, path: str | Path) -> None:
    """Write 16-bit mono PCM; inverse of load_wav for in-range values."""
    ints = np.clip(np.round(np.asarray(clip.samples, dtype=np.float64) * _INT16_SCALE),
                   -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(clip.sample_rate)
        w.writeframes(ints.tobytes())


def frame_instances(clip: AudioClip) -> list[InstanceWindow]:
    """Cut a clip into non-overlapping one-second windows.

    The trailing partial second is dropped: annotations cover whole seconds
    only, so padding would create unlabeled content.
    """
    if clip.sample_rate != TARGET_SAMPLE_RATE:
        raise WrongSampleRate(
            f"expected {TARGET_SAMPLE_RATE} Hz, got {clip.sample_rate}")
    n = len(clip.samples) // TARGET_SAMPLE_RATE
    return [
        InstanceWindow(
            clip_ref=clip.source_id,
            index=i,
            samples=clip.samples[i * TARGET_SAMPLE_RATE:(i + 1) * TARGET_SAMPLE_RATE],
        )
        for i in range(n)
    ]
