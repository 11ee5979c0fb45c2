from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for helpers / reference_impl

from helpers import make_wav_bytes  # noqa: E402


@pytest.fixture
def wav_dir(tmp_path):
    def write(name, int16_samples, **kwargs):
        path = tmp_path / name
        path.write_bytes(make_wav_bytes(int16_samples, **kwargs))
        return path
    return write
