"""Reference HR from R-peaks and the accuracy scores used to judge estimates.

Note the Bland-Altman limits here are built from the *absolute* error
(MAE +/- 1.96 STD of |error|), not the conventional signed difference.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import UndefinedCorrelationError, ValidationError
from .io import ReferenceAnnotation


@dataclass(frozen=True)
class PairedSeries:
    bpm_true: np.ndarray
    bpm_est: np.ndarray
    frame_times_s: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.bpm_true, dtype=np.float64)
        e = np.asarray(self.bpm_est, dtype=np.float64)
        times = np.arange(t.size, dtype=np.float64) if self.frame_times_s is None \
            else np.asarray(self.frame_times_s, dtype=np.float64)
        if t.ndim != 1 or t.size == 0:
            raise ValidationError("paired series needs at least one frame")
        if e.shape != t.shape or times.shape != t.shape:
            raise ValidationError(
                f"paired series lengths differ: true={t.size}, est={e.size}, times={times.size}"
            )
        for name, arr in (("bpm_true", t), ("bpm_est", e)):
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name} contains non-finite values")
            if np.any(arr <= 0):
                raise ValidationError(f"{name} contains non-positive heart rates")
        object.__setattr__(self, "bpm_true", t)
        object.__setattr__(self, "bpm_est", e)
        object.__setattr__(self, "frame_times_s", times)

    @property
    def abs_error(self) -> np.ndarray:
        return np.abs(self.bpm_est - self.bpm_true)

    def __len__(self):
        return self.bpm_true.size


@dataclass(frozen=True)
class MetricsReport:
    mae_bpm: float
    std_bpm: float
    pearson_r: float
    bland_altman: tuple[float, float]
    n_frames: int

    def as_dict(self) -> dict:
        d = asdict(self)
        # JSON has no NaN; an undefined correlation is written as null
        if not np.isfinite(self.pearson_r):
            d["pearson_r"] = None
        d["bland_altman"] = list(self.bland_altman)
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


def reference_hr(annotation: ReferenceAnnotation, frames) -> np.ndarray:
    """60 / mean R-R interval of the peaks inside each ``(start_s, end_s)`` frame."""
    peaks = annotation.rpeak_times_s
    out = []
    for k, (start, end) in enumerate(frames):
        inside = peaks[(peaks >= start) & (peaks <= end)]
        if inside.size < 2:
            raise ValidationError(
                f"frame {k} [{start:g}, {end:g}] s holds {inside.size} R-peak(s); need at least 2"
            )
        mean_rr = (inside[-1] - inside[0]) / (inside.size - 1)
        out.append(60.0 / mean_rr)
    return np.asarray(out)


def mae(p: PairedSeries) -> float:
    return float(np.mean(p.abs_error))


def std_abs_err(p: PairedSeries) -> float:
    """Population (1/N) standard deviation of the absolute error."""
    err = p.abs_error
    return float(np.sqrt(np.mean((err - err.mean()) ** 2)))


def pearson_r(p: PairedSeries) -> float:
    if len(p) < 2:
        raise UndefinedCorrelationError("pearson_r needs at least two frames")
    x = p.bpm_true - p.bpm_true.mean()
    y = p.bpm_est - p.bpm_est.mean()
    sxx = float(np.dot(x, x))
    syy = float(np.dot(y, y))
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("pearson_r is undefined for a constant series")
    r = float(np.dot(x, y)) / np.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, r)))


def bland_altman(p: PairedSeries):
    """Return ``(means, diffs, (lower, upper))``; ``diffs`` are absolute errors."""
    means = (p.bpm_true + p.bpm_est) / 2.0
    diffs = p.abs_error
    m, s = mae(p), std_abs_err(p)
    return means, diffs, (m - 1.96 * s, m + 1.96 * s)


def evaluate(p: PairedSeries) -> MetricsReport:
    """Every score at once. ``pearson_r`` is NaN when the correlation is undefined."""
    try:
        r = pearson_r(p)
    except UndefinedCorrelationError:
        r = float("nan")
    _, _, limits = bland_altman(p)
    return MetricsReport(mae(p), std_abs_err(p), r, (float(limits[0]), float(limits[1])), len(p))
