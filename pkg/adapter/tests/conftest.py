from __future__ import annotations

import sys
from pathlib import Path

import pytest
import torch

sys.path.insert(0, str(Path(__file__).parent))  # for adapter_helpers

from adapter_helpers import write_wav  # noqa: E402

import numpy as np


class _RawEncoder(torch.nn.Module):
    """(B, 16000) -> (B, out_dim): coarse energy profile through a linear map."""

    def __init__(self, out_dim: int):
        super().__init__()
        self.proj = torch.nn.Linear(100, out_dim)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        profile = x.reshape(x.shape[0], 100, 160).abs().mean(dim=-1)
        return self.proj(profile)


class _MelEncoder(torch.nn.Module):
    """(B, 100, 128) -> (B, out_dim)."""

    def __init__(self, out_dim: int):
        super().__init__()
        self.proj = torch.nn.Linear(128, out_dim)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.proj(x.mean(dim=1))


def _save_scripted(module: torch.nn.Module, path: Path) -> Path:
    torch.jit.script(module.eval()).save(str(path))
    return path


@pytest.fixture(scope="session")
def checkpoints(tmp_path_factory):
    root = tmp_path_factory.mktemp("ckpt")
    torch.manual_seed(0)
    return {
        "raw512": _save_scripted(_RawEncoder(512), root / "raw512.pt"),
        "raw300": _save_scripted(_RawEncoder(300), root / "raw300.pt"),
        "mel1000": _save_scripted(_MelEncoder(1000), root / "mel1000.pt"),
    }


@pytest.fixture
def wav_corpus(tmp_path):
    """Three files, 2 + 3 + 1 whole seconds, lexicographic order a < b < c."""
    rng = np.random.default_rng(0)
    corpus = tmp_path / "wavs"
    corpus.mkdir()
    write_wav(corpus / "a.wav", 0.2 * rng.standard_normal(32000))
    write_wav(corpus / "b.wav", 0.2 * rng.standard_normal(48000))
    write_wav(corpus / "c.wav", 0.2 * rng.standard_normal(16000 + 7000))  # partial tail
    return corpus
