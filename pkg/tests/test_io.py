import wave

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcghr.errors import ConfigError, ParseError, ValidationError
from bcghr.io import (Recording, ReferenceAnnotation, load_annotation, load_recording,
                      save_annotation, save_recording)


def write(path, text):
    path.write_text(text)
    return path


def test_csv_30s_at_225hz(tmp_path):
    rows = "\n".join(str(np.sin(i / 10)) for i in range(6750))
    rec = load_recording(write(tmp_path / "a.csv", f"# sample_rate_hz=225\n{rows}\n"))
    assert rec.sample_rate_hz == 225.0
    assert len(rec) == 6750
    assert rec.duration_s == pytest.approx(30.0)


def test_single_row_is_valid(tmp_path):
    rec = load_recording(write(tmp_path / "one.csv", "# sample_rate_hz=225\n0.0\n"))
    assert len(rec) == 1


def test_nan_token_rejected(tmp_path):
    with pytest.raises(ValidationError):
        load_recording(write(tmp_path / "nan.csv", "# sample_rate_hz=225\n0.1\nNaN\n"))


def test_malformed_line_names_location(tmp_path):
    with pytest.raises(ParseError, match=r"bad\.csv:3"):
        load_recording(write(tmp_path / "bad.csv", "# sample_rate_hz=225\n0.1\nabc\n"))


def test_missing_rate_is_config_error(tmp_path):
    with pytest.raises(ConfigError):
        load_recording(write(tmp_path / "norate.csv", "0.1\n0.2\n"))


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_recording(tmp_path / "nope.csv")


def test_recording_is_immutable():
    rec = Recording([1.0, 2.0], 10.0)
    with pytest.raises(ValueError):
        rec.samples[0] = 5.0


def test_recording_invariants():
    with pytest.raises(ValidationError):
        Recording([], 10.0)
    with pytest.raises(ValidationError):
        Recording([1.0], 0.0)
    with pytest.raises(ValidationError):
        Recording([1.0, np.inf], 10.0)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1, max_size=200),
       st.floats(min_value=1e-3, max_value=1e5, allow_nan=False))
def test_csv_round_trip_bit_exact(tmp_path_factory, values, rate):
    path = tmp_path_factory.mktemp("rt") / "r.csv"
    rec = Recording(values, rate, "x")
    back = load_recording(save_recording(rec, path))
    assert back.sample_rate_hz == rec.sample_rate_hz
    assert np.array_equal(back.samples.view(np.uint64), rec.samples.view(np.uint64))
    assert back.label == "x"


@pytest.mark.parametrize("width", [1, 2, 3, 4])
def test_wav_pcm_scaled_to_unit_range(tmp_path, width):
    full = 2 ** (8 * width - 1)
    ints = np.array([0, full // 2, -full // 2, full - 1, -full])
    path = tmp_path / "x.wav"
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(width)
        wf.setframerate(225)
        if width == 1:
            raw = (ints + 128).astype(np.uint8).tobytes()
        elif width == 3:
            u = ints.astype(np.int64) & 0xFFFFFF
            raw = np.stack([u & 0xFF, (u >> 8) & 0xFF, (u >> 16) & 0xFF], axis=1).astype(np.uint8).tobytes()
        else:
            raw = ints.astype(f"<i{width}").tobytes()
        wf.writeframes(raw)
    rec = load_recording(path)
    assert rec.sample_rate_hz == 225.0
    np.testing.assert_allclose(rec.samples, ints / full)
    assert rec.samples.min() >= -1.0 and rec.samples.max() <= 1.0


def test_wav_garbage_is_parse_error(tmp_path):
    with pytest.raises(ParseError):
        load_recording(write(tmp_path / "junk.wav", "not a wav"))


def test_annotation_parse(tmp_path):
    ann = load_annotation(write(tmp_path / "a.txt", "0.8\n1.6\n2.4\n"))
    assert len(ann) == 3
    np.testing.assert_array_equal(ann.rpeak_times_s, [0.8, 1.6, 2.4])


def test_annotation_non_monotonic(tmp_path):
    with pytest.raises(ValidationError):
        load_annotation(write(tmp_path / "a.txt", "1.0\n0.5\n"))


def test_annotation_empty(tmp_path):
    with pytest.raises(ValidationError):
        load_annotation(write(tmp_path / "a.txt", "\n# nothing\n"))


def test_annotation_beyond_duration():
    with pytest.raises(ValidationError):
        ReferenceAnnotation([1.0, 70.0], duration_s=60.0)


def test_uniform_train_implies_60_bpm(tmp_path):
    from bcghr.metrics import reference_hr

    ann = load_annotation(write(tmp_path / "a.txt", "".join(f"{k}.0\n" for k in range(61))))
    assert len(ann) == 61
    np.testing.assert_allclose(reference_hr(ann, [(0, 30), (15, 45), (30, 60)]), 60.0)


def test_annotation_rewrite_idempotent(tmp_path):
    first = load_annotation(write(tmp_path / "a.txt", "0.1\n0.93\n1.7000000001\n"))
    second = load_annotation(save_annotation(first, tmp_path / "b.txt"))
    third = load_annotation(save_annotation(second, tmp_path / "c.txt"))
    assert np.array_equal(first.rpeak_times_s, second.rpeak_times_s)
    assert (tmp_path / "b.txt").read_text() == (tmp_path / "c.txt").read_text()
    assert np.array_equal(second.rpeak_times_s, third.rpeak_times_s)
