"""Analytic signal and pulse-envelope power of a filtered BCG frame."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class AnalyticFrame:
    real_part: np.ndarray
    imag_part: np.ndarray
    envelope_power: np.ndarray

    def __post_init__(self):
        n = len(self.real_part)
        if len(self.imag_part) != n or len(self.envelope_power) != n:
            raise ValidationError("analytic frame components differ in length")
        for name in ("real_part", "imag_part", "envelope_power"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def analytic(self) -> np.ndarray:
        return self.real_part + 1j * self.imag_part


def hilbert_transform(x) -> np.ndarray:
    """Discrete Hilbert transform by the one-sided spectrum construction.

    Negative-frequency bins are zeroed, positive ones doubled, and the DC
    (and, for even lengths, Nyquist) bins kept as-is; the imaginary part of
    the inverse FFT is the transform.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    gain = np.zeros(n)
    gain[0] = 1.0
    if n % 2 == 0:
        gain[n // 2] = 1.0
        gain[1 : n // 2] = 2.0
    else:
        gain[1 : (n + 1) // 2] = 2.0
    return np.fft.ifft(np.fft.fft(x) * gain).imag


def analytic_signal(x) -> AnalyticFrame:
    """Build the analytic frame of ``x``; ``envelope_power`` is |h(n)|²."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ValidationError("analytic_signal needs a 1-D sequence of at least 2 samples")
    if not np.all(np.isfinite(x)):
        raise ValidationError("analytic_signal input contains non-finite values")
    imag = hilbert_transform(x)
    return AnalyticFrame(x.copy(), imag, x * x + imag * imag)


def envelope_for_spectrum(frame: AnalyticFrame) -> np.ndarray:
    """Mean-removed envelope power; the DC term would otherwise swamp the peak search."""
    p = frame.envelope_power
    return p - p.mean()
