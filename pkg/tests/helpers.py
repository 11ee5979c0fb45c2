"""Shared test utilities for the primary suite."""

from __future__ import annotations

import struct

import numpy as np


def make_wav_bytes(int16_samples, sample_rate=16000, channels=1, bits=16,
                   format_tag=1, extra_chunk=None):
    """Build a WAV file byte-by-byte, independent of the package writer."""
    data = b"".join(struct.pack("<h", s) for s in int16_samples)
    block_align = channels * bits // 8
    fmt = struct.pack("<HHIIHH", format_tag, channels, sample_rate,
                      sample_rate * block_align, block_align, bits)
    chunks = b"fmt " + struct.pack("<I", len(fmt)) + fmt
    if extra_chunk is not None:
        cid, body = extra_chunk
        chunks += cid + struct.pack("<I", len(body)) + body + (b"\0" if len(body) % 2 else b"")
    chunks += b"data" + struct.pack("<I", len(data)) + data
    return b"RIFF" + struct.pack("<I", 4 + len(chunks)) + b"WAVE" + chunks


def random_window(seed, scale=0.1):
    rng = np.random.default_rng(seed)
    return np.clip(scale * rng.standard_normal(16000), -1.0, 1.0)
