from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fgsense.audio_io import AudioClip, frame_instances, load_wav, write_wav
from fgsense.errors import MalformedWav, UnsupportedFormat, WrongSampleRate

from helpers import make_wav_bytes


def test_silence_loads_as_zeros(wav_dir):
    clip = load_wav(wav_dir("silence.wav", [0] * 16000))
    assert len(clip.samples) == 16000
    assert np.all(clip.samples == 0.0)
    assert clip.sample_rate == 16000
    assert clip.source_id == "silence"


def test_int16_scaling_hand_values(wav_dir):
    clip = load_wav(wav_dir("vals.wav", [-32768, 0, 16384]))
    assert clip.samples.tolist() == [-1.0, 0.0, 0.5]


def test_two_channels_rejected(wav_dir):
    with pytest.raises(UnsupportedFormat):
        load_wav(wav_dir("stereo.wav", [0, 0, 0, 0], channels=2))


def test_eight_bit_rejected(wav_dir):
    with pytest.raises(UnsupportedFormat):
        load_wav(wav_dir("8bit.wav", [0, 0], bits=8))


def test_float_format_rejected(wav_dir):
    with pytest.raises(UnsupportedFormat):
        load_wav(wav_dir("float.wav", [0, 0], format_tag=3))


def test_not_riff_rejected(tmp_path):
    path = tmp_path / "garbage.wav"
    path.write_bytes(b"not a wav file at all")
    with pytest.raises(MalformedWav):
        load_wav(path)


def test_truncated_data_rejected(tmp_path):
    blob = make_wav_bytes([1, 2, 3, 4])
    path = tmp_path / "cut.wav"
    path.write_bytes(blob[:-3])
    with pytest.raises(MalformedWav):
        load_wav(path)


def test_missing_data_chunk_rejected(tmp_path):
    blob = make_wav_bytes([])
    # strip the (empty) data chunk entirely
    path = tmp_path / "nodata.wav"
    path.write_bytes(blob[: blob.rindex(b"data")])
    with pytest.raises(MalformedWav):
        load_wav(path)


def test_unknown_chunks_are_skipped(wav_dir):
    clip = load_wav(wav_dir("listed.wav", [100, -100],
                            extra_chunk=(b"LIST", b"INFOsomething")))
    assert len(clip.samples) == 2


def test_nonstandard_rate_loads_but_does_not_frame(wav_dir):
    clip = load_wav(wav_dir("44k.wav", [0] * 100, sample_rate=44100))
    assert clip.sample_rate == 44100
    with pytest.raises(WrongSampleRate):
        frame_instances(clip)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(min_value=-32768, max_value=32767), min_size=1, max_size=2000))
def test_write_read_roundtrip_is_sample_exact(tmp_path_factory, ints):
    expected = np.array(ints, dtype=np.int16).astype(np.float32) / 32768.0
    clip = AudioClip(samples=expected, sample_rate=16000, source_id="rt")
    path = tmp_path_factory.mktemp("rt") / "rt.wav"
    write_wav(clip, path)
    loaded = load_wav(path)
    assert np.array_equal(loaded.samples, expected)


@pytest.mark.parametrize("n_samples,n_windows", [
    (48000, 3),   # exact division
    (47999, 2),   # trailing partial second dropped
    (15999, 0),   # below one second
])
def test_frame_counts(n_samples, n_windows):
    clip = AudioClip(samples=np.zeros(n_samples, dtype=np.float32),
                     sample_rate=16000, source_id="c")
    windows = frame_instances(clip)
    assert len(windows) == n_windows
    assert [w.index for w in windows] == list(range(n_windows))


def test_windows_reproduce_clip_prefix():
    rng = np.random.default_rng(0)
    samples = (rng.integers(-32768, 32768, 50_000).astype(np.float32) / 32768.0)
    clip = AudioClip(samples=samples, sample_rate=16000, source_id="c")
    windows = frame_instances(clip)
    assert len(windows) == 3
    joined = np.concatenate([w.samples for w in windows])
    assert np.array_equal(joined, samples[:48000])
    for w in windows:
        assert len(w.samples) == 16000
