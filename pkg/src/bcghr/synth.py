"""Synthetic chair-BCG generator with known beat times.

The model is ``s = r + a * cos(2*pi*f0*t) + e`` with

* ``r``  a respiration sinusoid,
* ``a``  a nonnegative train of raised-cosine pulses, one per heartbeat,
* ``f0`` a carrier inside the band-pass,
* ``e``  seeded white Gaussian noise.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .io import Recording, ReferenceAnnotation, save_annotation, save_recording

HR_MIN_BPM = 36.0
HR_MAX_BPM = 240.0


@dataclass(frozen=True)
class SignalModelParams:
    """Generator parameters.

    ``hr_profile`` holds ``(time_s, bpm)`` breakpoints of a piecewise-linear
    heart-rate curve, held constant before the first and after the last one.
    """

    hr_profile: tuple[tuple[float, float], ...] = ((0.0, 72.0),)
    resp_rate_hz: float = 0.25
    resp_amp: float = 1.0
    carrier_hz: float = 5.0
    pulse_width_s: float = 0.12
    pulse_amp: float = 1.0
    noise_std: float = 0.1
    seed: int = 0
    sample_rate_hz: float = 225.0
    duration_s: float = 60.0
    band_hz: tuple[float, float] = field(default=(0.7, 10.0), compare=False)

    def __post_init__(self):
        profile = tuple((float(t), float(b)) for t, b in self.hr_profile)
        if not profile:
            raise ValidationError("hr_profile needs at least one breakpoint")
        times = [t for t, _ in profile]
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValidationError("hr_profile breakpoint times must be strictly increasing")
        for _, bpm in profile:
            if not HR_MIN_BPM <= bpm <= HR_MAX_BPM:
                raise ValidationError(f"hr_profile value {bpm} BPM outside [36, 240]")
        object.__setattr__(self, "hr_profile", profile)
        if not self.sample_rate_hz > 0 or not self.duration_s > 0:
            raise ValidationError("sample_rate_hz and duration_s must be positive")
        lo, hi = self.band_hz
        if not lo < self.carrier_hz < hi:
            raise ValidationError(f"carrier_hz {self.carrier_hz} not strictly inside band {self.band_hz}")
        min_interval = 60.0 / max(b for _, b in profile)
        if not 0 < self.pulse_width_s < min_interval:
            raise ValidationError(
                f"pulse_width_s {self.pulse_width_s} must be positive and below the "
                f"shortest beat interval {min_interval:.4f} s"
            )
        if self.noise_std < 0 or self.pulse_amp < 0 or self.resp_amp < 0:
            raise ValidationError("amplitudes and noise_std must be nonnegative")

    def hr_at(self, t) -> np.ndarray:
        times, bpm = zip(*self.hr_profile)
        return np.interp(t, times, bpm)

    def expected_beats(self) -> float:
        """Integral of the heart-rate profile over the recording, in beats."""
        t = np.linspace(0.0, self.duration_s, 200_001)
        return float(np.trapezoid(self.hr_at(t), t) / 60.0)


def beat_times(params: SignalModelParams) -> np.ndarray:
    """Times where the integrated beat phase crosses each integer (first beat at t = 0)."""
    fs = params.sample_rate_hz
    # fine grid: 8x oversampled keeps crossings well inside one sample
    n_grid = int(math.ceil(params.duration_s * fs * 8)) + 1
    t = np.linspace(0.0, params.duration_s, n_grid)
    rate = params.hr_at(t) / 60.0
    phase = np.concatenate([[0.0], np.cumsum((rate[1:] + rate[:-1]) * 0.5 * np.diff(t))])
    k = np.arange(0, int(math.floor(phase[-1])) + 1)
    beats = np.interp(k, phase, t)
    n = int(round(params.duration_s * fs))
    return beats[beats < n / fs]


def pulse_envelope(params: SignalModelParams, beats: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Raised-cosine pulse of ``pulse_width_s`` starting at each beat."""
    fs = params.sample_rate_hz
    width = params.pulse_width_s
    a = np.zeros_like(t)
    span = int(math.ceil(width * fs)) + 1
    for onset in beats:
        i0 = int(math.ceil(onset * fs - 1e-9))
        idx = np.arange(i0, min(i0 + span, t.size))
        u = (t[idx] - onset) / width
        inside = (u >= 0) & (u <= 1)
        a[idx[inside]] += 0.5 * (1.0 - np.cos(2.0 * np.pi * u[inside]))
    return params.pulse_amp * a


def generate_bcg(params: SignalModelParams, label: str = "synthetic"):
    """Return ``(Recording, ReferenceAnnotation)`` drawn from the signal model."""
    fs = params.sample_rate_hz
    n = int(round(params.duration_s * fs))
    t = np.arange(n) / fs
    beats = beat_times(params)
    a = pulse_envelope(params, beats, t)
    rng = np.random.default_rng(params.seed)
    noise = params.noise_std * rng.standard_normal(n)
    resp = params.resp_amp * np.sin(2.0 * np.pi * params.resp_rate_hz * t)
    s = resp + a * np.cos(2.0 * np.pi * params.carrier_hz * t) + noise
    rec = Recording(s, fs, label)
    return rec, ReferenceAnnotation(beats, rec.duration_s)


# -- corpus description -------------------------------------------------------

_FLOAT_KEYS = ("resp_rate_hz", "resp_amp", "carrier_hz", "pulse_width_s", "pulse_amp",
               "noise_std", "sample_rate_hz", "duration_s")


def parse_hr_profile(text: str) -> tuple[tuple[float, float], ...]:
    """``"0:60, 600:90"`` -> ((0, 60), (600, 90)); a bare number means constant HR."""
    text = text.strip()
    if ":" not in text:
        return ((0.0, float(text)),)
    points = []
    for item in text.split(","):
        t, _, bpm = item.strip().partition(":")
        points.append((float(t), float(bpm)))
    return tuple(points)


def format_hr_profile(profile) -> str:
    return ", ".join(f"{t!r}:{b!r}" for t, b in profile)


def parse_corpus_spec(text: str, source: str = "<string>") -> dict[str, SignalModelParams]:
    """Parse ``[name]`` blocks of ``key = value`` lines into generator params.

    Keys in a ``[DEFAULT]`` block apply to every recording.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ParseError(str(exc), source) from None
    out = {}
    for name in cp.sections():
        sec = cp[name]
        kwargs = {}
        try:
            for key, value in sec.items():
                if key == "hr_profile":
                    kwargs[key] = parse_hr_profile(value)
                elif key == "seed":
                    kwargs[key] = int(value)
                elif key in _FLOAT_KEYS:
                    kwargs[key] = float(value)
                else:
                    raise ParseError(f"unknown key {key!r} in block [{name}]", source)
        except ValueError as exc:
            raise ParseError(f"block [{name}]: {exc}", source) from None
        out[name] = SignalModelParams(**kwargs)
    return out


def format_corpus_spec(corpus: dict[str, SignalModelParams]) -> str:
    blocks = []
    for name, p in corpus.items():
        lines = [f"[{name}]", f"hr_profile = {format_hr_profile(p.hr_profile)}", f"seed = {p.seed}"]
        lines += [f"{k} = {getattr(p, k)!r}" for k in _FLOAT_KEYS]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


def make_corpus(corpus: dict[str, SignalModelParams], out_dir=None):
    """Generate every recording; when ``out_dir`` is given write ``<name>.csv`` and
    ``<name>.rpeaks`` there. Returns ``{name: (Recording, ReferenceAnnotation)}``."""
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
    result = {}
    for name, params in corpus.items():
        rec, ann = generate_bcg(params, label=name)
        if out_dir is not None:
            save_recording(rec, out_dir / f"{name}.csv")
            save_annotation(ann, out_dir / f"{name}.rpeaks")
        result[name] = (rec, ann)
    return result


def _sinusoidal_profile(base, amp, period_s, duration_s, step_s=5.0):
    t = np.arange(0.0, duration_s + step_s, step_s)
    return tuple((float(x), float(base + amp * np.sin(2 * np.pi * x / period_s))) for x in t)


def seven_subject_corpus(duration_s: float = 900.0, noise_std: float = 0.3,
                         pulse_amp: float = 1.0, seed: int = 1000) -> dict[str, SignalModelParams]:
    """Seven ~15 minute recordings at 225 Hz with HR between 55 and 100 BPM.

    Two constant, three ramps, two slow sinusoidal drifts (peak slope under
    5 BPM/min).
    """
    d = duration_s
    profiles = {
        "subject1": ((0.0, 62.0),),
        "subject2": ((0.0, 88.0),),
        "subject3": ((0.0, 60.0), (d, 90.0)),
        "subject4": ((0.0, 98.0), (d, 70.0)),
        "subject5": ((0.0, 55.0), (d / 2, 75.0), (d, 66.0)),
        "subject6": _sinusoidal_profile(72.0, 5.0, 420.0, d),
        "subject7": _sinusoidal_profile(84.0, 4.0, 360.0, d),
    }
    return {
        name: SignalModelParams(
            hr_profile=prof, resp_rate_hz=0.25, resp_amp=1.0, carrier_hz=5.0,
            pulse_width_s=0.12, pulse_amp=pulse_amp, noise_std=noise_std * pulse_amp,
            seed=seed + i, sample_rate_hz=225.0, duration_s=d,
        )
        for i, (name, prof) in enumerate(profiles.items())
    }
