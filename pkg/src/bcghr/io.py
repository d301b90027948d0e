"""Recording and R-peak annotation containers plus their on-disk formats.

Recording CSV::

    # sample_rate_hz=225
    # label=subject1
    0.0123
    -0.0456
    ...

Annotation file: one R-peak time in seconds per line, strictly increasing.
Blank lines and ``#`` comments are ignored in both formats.
"""

from __future__ import annotations

import math
import wave
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, ParseError, ValidationError


def _frozen_array(values, name):
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Recording:
    """Uniformly sampled BCG trace.

    ``samples`` is stored as a read-only float64 array.
    """

    samples: np.ndarray
    sample_rate_hz: float
    label: str = ""

    def __post_init__(self):
        samples = _frozen_array(self.samples, "samples")
        if samples.size == 0:
            raise ValidationError("recording has no samples")
        if not np.all(np.isfinite(samples)):
            bad = int(np.flatnonzero(~np.isfinite(samples))[0])
            raise ValidationError(f"non-finite sample at index {bad}")
        rate = float(self.sample_rate_hz)
        if not math.isfinite(rate) or rate <= 0:
            raise ValidationError(f"sample_rate_hz must be positive, got {self.sample_rate_hz!r}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate_hz", rate)

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz

    def __len__(self):
        return self.samples.size


@dataclass(frozen=True)
class ReferenceAnnotation:
    """Strictly increasing R-peak (or synthetic beat onset) times in seconds."""

    rpeak_times_s: np.ndarray
    duration_s: float | None = field(default=None, compare=False)

    def __post_init__(self):
        times = _frozen_array(self.rpeak_times_s, "rpeak_times_s")
        if times.size == 0:
            raise ValidationError("annotation contains no R-peaks")
        if not np.all(np.isfinite(times)):
            raise ValidationError("annotation contains non-finite timestamps")
        if times[0] < 0:
            raise ValidationError(f"negative timestamp {times[0]}")
        steps = np.diff(times)
        if np.any(steps <= 0):
            k = int(np.flatnonzero(steps <= 0)[0]) + 1
            raise ValidationError(
                f"timestamps not strictly increasing at entry {k} "
                f"({times[k - 1]!r} then {times[k]!r})"
            )
        if self.duration_s is not None and times[-1] > self.duration_s:
            raise ValidationError(
                f"last R-peak {times[-1]} s is past the recording end {self.duration_s} s"
            )
        object.__setattr__(self, "rpeak_times_s", times)

    def __len__(self):
        return self.rpeak_times_s.size


def _parse_header(line, lineno, meta):
    body = line.lstrip("#").strip()
    if "=" in body:
        key, _, value = body.partition("=")
        meta[key.strip()] = (value.strip(), lineno)


def _read_csv(path: Path) -> Recording:
    meta: dict[str, tuple[str, int]] = {}
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                _parse_header(line, lineno, meta)
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise ParseError(f"cannot parse sample {line!r}", f"{path}:{lineno}") from None
    if "sample_rate_hz" not in meta:
        raise ConfigError(f"{path}: missing '# sample_rate_hz=' header")
    rate_text, lineno = meta["sample_rate_hz"]
    try:
        rate = float(rate_text)
    except ValueError:
        raise ParseError(f"bad sample rate {rate_text!r}", f"{path}:{lineno}") from None
    label = meta.get("label", (path.stem, 0))[0]
    return Recording(np.asarray(values, dtype=np.float64), rate, label)


def _read_wav(path: Path) -> Recording:
    try:
        with wave.open(str(path), "rb") as wf:
            n_channels = wf.getnchannels()
            width = wf.getsampwidth()
            rate = wf.getframerate()
            raw = wf.readframes(wf.getnframes())
    except (wave.Error, EOFError) as exc:
        raise ParseError(f"not a readable PCM WAV file ({exc})", str(path)) from None
    if width == 1:
        data = (np.frombuffer(raw, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    elif width in (2, 4):
        dtype = np.dtype(f"<i{width}")
        data = np.frombuffer(raw, dtype=dtype).astype(np.float64) / float(2 ** (8 * width - 1))
    elif width == 3:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        ints = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        ints = np.where(ints >= 1 << 23, ints - (1 << 24), ints)
        data = ints.astype(np.float64) / float(1 << 23)
    else:
        raise ParseError(f"unsupported sample width {width} bytes", str(path))
    if n_channels > 1:
        # first channel only; BCG is single-channel
        data = data.reshape(-1, n_channels)[:, 0]
    return Recording(data, float(rate), path.stem)


def load_recording(path, format: str | None = None) -> Recording:
    """Load a recording from ``path``.

    ``format`` is ``"csv"`` or ``"wav"``; when omitted it is inferred from the
    file suffix (anything other than ``.wav`` is read as CSV).
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(path)
    if format is None:
        format = "wav" if path.suffix.lower() == ".wav" else "csv"
    if format == "csv":
        return _read_csv(path)
    if format == "wav":
        return _read_wav(path)
    raise ConfigError(f"unknown recording format {format!r}")


def save_recording(recording: Recording, path) -> Path:
    """Write ``recording`` as CSV; floats use ``repr`` so reloads are bit-exact."""
    path = Path(path)
    lines = [f"# sample_rate_hz={recording.sample_rate_hz!r}"]
    if recording.label:
        lines.append(f"# label={recording.label}")
    lines.extend(repr(float(v)) for v in recording.samples)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def load_annotation(path, duration_s: float | None = None) -> ReferenceAnnotation:
    """Read one R-peak timestamp (seconds) per line."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(path)
    times = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                times.append(float(line))
            except ValueError:
                raise ParseError(f"cannot parse timestamp {line!r}", f"{path}:{lineno}") from None
    if not times:
        raise ValidationError(f"{path}: annotation file is empty")
    return ReferenceAnnotation(np.asarray(times), duration_s)


def save_annotation(annotation: ReferenceAnnotation, path) -> Path:
    path = Path(path)
    path.write_text(
        "".join(f"{float(t)!r}\n" for t in annotation.rpeak_times_s), encoding="utf-8"
    )
    return path
