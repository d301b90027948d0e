"""Sliding-window heart-rate tracker and its per-frame output formats."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .config import PipelineConfig
from .envelope import AnalyticFrame, analytic_signal, envelope_for_spectrum
from .errors import ParseError, RangeError, ValidationError
from .io import Recording
from .preprocess import design_bandpass, filtfilt
from .spectral import Spectrum, frame_spectrum, peak_pick, pick_at, vocoder_refine

# frame is degenerate when its peak envelope-spectrum magnitude is at most this
# fraction of the mean-removed raw frame energy, or of the recording's average
# energy per frame if larger (all scale with amplitude squared). Filter edge
# transients alone sit near 1e-8; real pulses near 1e-2.
DEGENERATE_RATIO = 1e-6

FLAG_OK = "ok"
FLAG_HELD = "held"
FLAG_DEGENERATE = "degenerate"
FLAG_FALLBACK = "fallback"

CSV_FIELDS = ("frame_index", "frame_start_s", "f_i_hz", "f_r_hz", "hr_bpm", "flag")


@dataclass(frozen=True)
class HrEstimate:
    frame_index: int
    frame_start_s: float
    f_i: float
    f_r: float
    hr_bpm: float
    search_band_bpm: tuple[float, float]
    flag: str = FLAG_OK
    bin_index: int = -1
    bin_spacing_hz: float = math.nan

    def row(self) -> dict:
        return {
            "frame_index": self.frame_index,
            "frame_start_s": self.frame_start_s,
            "f_i_hz": self.f_i,
            "f_r_hz": self.f_r,
            "hr_bpm": self.hr_bpm,
            "flag": self.flag,
        }


def frames(recording: Recording, window_s: float, hop_s: float) -> list[tuple[int, int]]:
    """Half-open sample ranges of every full window; trailing partial window dropped."""
    fs = recording.sample_rate_hz
    win = int(round(window_s * fs))
    hop = int(round(hop_s * fs))
    if win < 1 or hop < 1:
        raise ValidationError(f"window ({win}) and hop ({hop}) must span at least one sample")
    n = len(recording)
    if n < win:
        raise ValidationError(
            f"recording of {recording.duration_s:g} s is shorter than one {window_s:g} s window"
        )
    count = (n - win) // hop + 1
    return [(k * hop, k * hop + win) for k in range(count)]


def next_search_band(prev_hr_bpm: float, continuity_bpm: float,
                     global_band_hz: tuple[float, float]) -> tuple[float, float]:
    """Band within ``continuity_bpm`` of the previous HR, clipped to the global band."""
    lo = max((prev_hr_bpm - continuity_bpm) / 60.0, global_band_hz[0])
    hi = min((prev_hr_bpm + continuity_bpm) / 60.0, global_band_hz[1])
    return lo, hi


def _bpm(band):
    return (band[0] * 60.0, band[1] * 60.0)


FrameHook = Callable[[int, AnalyticFrame, Spectrum], None]


def estimate_hr(recording: Recording, config: PipelineConfig | None = None,
                on_frame: FrameHook | None = None) -> list[HrEstimate]:
    """Estimate heart rate once per window.

    The band-pass runs once over the whole recording; the analytic signal,
    envelope and spectrum are computed per frame. Frame 0 searches the global
    band and reports ``f_r = f_i``. Later frames search within
    ``continuity_bpm`` of the previous estimate and refine the peak with the
    phase change at the same bin between the previous and current spectra.

    ``on_frame(index, analytic_frame, spectrum)`` is called for every frame
    when given (used by the CLI dump options).
    """
    config = config or PipelineConfig()
    fs = recording.sample_rate_hz
    config.check_rate(fs)
    ranges = frames(recording, config.window_s, config.hop_s)
    spec = design_bandpass(config.band_low_hz, config.band_high_hz, fs, config.filter_order)
    filtered = filtfilt(recording.samples, spec)
    hop_s = (ranges[1][0] - ranges[0][0]) / fs if len(ranges) > 1 else config.hop_s
    global_band = config.global_band_hz
    centred = recording.samples - recording.samples.mean()
    mean_frame_energy = float(np.dot(centred, centred)) * (ranges[0][1] - ranges[0][0]) / len(recording)

    out: list[HrEstimate] = []
    prev_spec: Spectrum | None = None
    prev_valid = False  # previous spectrum carries a usable phase
    prev_hr: float | None = None

    for k, (start, stop) in enumerate(ranges):
        start_s = start / fs
        frame = analytic_signal(filtered[start:stop])
        spectrum = frame_spectrum(envelope_for_spectrum(frame), fs, config.pad_factor,
                                  config.window_fn, start_s)
        if on_frame is not None:
            on_frame(k, frame, spectrum)

        flag = FLAG_OK
        if prev_hr is None:
            band = global_band
        else:
            clipped = min(max(prev_hr, global_band[0] * 60.0), global_band[1] * 60.0)
            band = next_search_band(clipped, config.continuity_bpm, global_band)
        try:
            pick = peak_pick(spectrum, *band)
        except RangeError:
            band = global_band
            pick = peak_pick(spectrum, *band)
            flag = FLAG_FALLBACK

        raw = recording.samples[start:stop]
        raw = raw - raw.mean()
        energy = max(float(np.dot(raw, raw)), mean_frame_energy)
        if pick.amplitude <= DEGENERATE_RATIO * energy:
            if prev_hr is None:
                out.append(HrEstimate(k, start_s, pick.f_i, pick.f_i, 60.0 * pick.f_i,
                                      _bpm(band), FLAG_DEGENERATE, pick.bin_index,
                                      spectrum.bin_spacing_hz))
            else:
                f_held = prev_hr / 60.0
                out.append(HrEstimate(k, start_s, pick.f_i, f_held, prev_hr, _bpm(band),
                                      FLAG_HELD, pick.bin_index, spectrum.bin_spacing_hz))
            prev_spec, prev_valid = spectrum, False
            continue

        if prev_valid and prev_spec is not None and prev_spec.fft_length == spectrum.fft_length:
            f_r = vocoder_refine(pick_at(prev_spec, pick.bin_index), pick, hop_s).f_r
        else:
            f_r = pick.f_i
        hr = 60.0 * f_r
        out.append(HrEstimate(k, start_s, pick.f_i, f_r, hr, _bpm(band), flag,
                              pick.bin_index, spectrum.bin_spacing_hz))
        prev_spec, prev_valid, prev_hr = spectrum, True, hr
    return out


def _header_lines(config: PipelineConfig | None, extra: dict | None) -> list[str]:
    meta = dict(config.as_dict()) if config is not None else {}
    meta.update(extra or {})
    return [f"# {k}={v}" for k, v in meta.items()]


def estimates_to_csv(estimates, config: PipelineConfig | None = None, extra: dict | None = None) -> str:
    buf = io.StringIO()
    for line in _header_lines(config, extra):
        buf.write(line + "\n")
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for est in estimates:
        writer.writerow({k: (repr(float(v)) if isinstance(v, float) else v) for k, v in est.row().items()})
    return buf.getvalue()


def estimates_to_json(estimates, config: PipelineConfig | None = None, extra: dict | None = None) -> str:
    payload = {
        "config": config.as_dict() if config is not None else {},
        **(extra or {}),
        "frames": [est.row() for est in estimates],
    }
    return json.dumps(payload, indent=2)


def write_estimates(estimates, path, config=None, format: str = "csv", extra=None) -> Path:
    path = Path(path)
    text = (estimates_to_json if format == "json" else estimates_to_csv)(estimates, config, extra)
    path.write_text(text, encoding="utf-8")
    return path


def read_estimates(path) -> tuple[list[dict], dict]:
    """Load estimates written by :func:`write_estimates`; returns (rows, header metadata)."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(path)
    text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc), f"{path}:{exc.lineno}") from None
        meta = dict(payload.get("config", {}))
        meta.update({k: v for k, v in payload.items() if k not in ("config", "frames")})
        rows = payload.get("frames", [])
    else:
        meta = {}
        body = []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value.strip()
            elif line.strip():
                body.append(line)
        rows = list(csv.DictReader(body))
    try:
        rows = [
            {
                "frame_index": int(r["frame_index"]),
                "frame_start_s": float(r["frame_start_s"]),
                "f_i_hz": float(r["f_i_hz"]),
                "f_r_hz": float(r["f_r_hz"]),
                "hr_bpm": float(r["hr_bpm"]),
                "flag": str(r["flag"]),
            }
            for r in rows
        ]
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"malformed estimates row ({exc})", str(path)) from None
    return rows, meta
