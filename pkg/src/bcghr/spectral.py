"""Zero-padded envelope spectrum, band-limited peak pick, phase-vocoder refinement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import WINDOW_FUNCTIONS
from .errors import ConfigError, RangeError, ValidationError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Spectrum:
    """One-sided FFT of a windowed, zero-padded frame."""

    bins: np.ndarray
    bin_spacing_hz: float
    fft_length: int
    frame_time_s: float = 0.0

    @property
    def frequencies_hz(self) -> np.ndarray:
        return np.arange(self.bins.size) * self.bin_spacing_hz

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.bins)


@dataclass(frozen=True)
class PeakPick:
    bin_index: int
    f_i: float
    amplitude: float
    phase: float


@dataclass(frozen=True)
class VocoderResult:
    f_r: float
    chosen_n: int
    candidates: tuple[tuple[int, float], ...] = field(default=())


def fft_length_for(n_samples: int, pad_factor: int) -> int:
    """FFT size for a frame of ``n_samples``.

    ``pad_factor == 1`` means no padding at all (the raw frame length).
    Larger factors round ``pad_factor * n_samples`` up to a power of two.
    """
    if int(pad_factor) != pad_factor or pad_factor < 1:
        raise ConfigError(f"pad_factor must be a positive integer, got {pad_factor!r}")
    if pad_factor == 1:
        return n_samples
    return 1 << (int(pad_factor) * n_samples - 1).bit_length()


def window_samples(window_fn: str, n: int) -> np.ndarray:
    if window_fn == "rectangular":
        return np.ones(n)
    if window_fn == "hann":
        return np.hanning(n)
    raise ConfigError(f"window_fn must be one of {WINDOW_FUNCTIONS}, got {window_fn!r}")


def frame_spectrum(env, sample_rate_hz: float, pad_factor: int = 8,
                   window_fn: str = "hann", frame_time_s: float = 0.0) -> Spectrum:
    env = np.asarray(env, dtype=np.float64)
    if env.ndim != 1 or env.size == 0:
        raise ValidationError("frame_spectrum needs a non-empty 1-D sequence")
    if not np.all(np.isfinite(env)):
        raise ValidationError("frame_spectrum input contains non-finite values")
    if not sample_rate_hz > 0:
        raise ConfigError("sample rate must be positive")
    n_fft = fft_length_for(env.size, pad_factor)
    bins = np.fft.rfft(env * window_samples(window_fn, env.size), n=n_fft)
    bins.setflags(write=False)
    return Spectrum(bins, sample_rate_hz / n_fft, n_fft, float(frame_time_s))


def _wrapped_phase(z: complex) -> float:
    phase = math.atan2(z.imag, z.real)
    # atan2 yields -pi for (-x, -0.0); keep the half-open interval (-pi, pi]
    return math.pi if phase == -math.pi else phase


def pick_at(spec: Spectrum, bin_index: int) -> PeakPick:
    """Read amplitude and phase of ``spec`` at a given bin."""
    z = complex(spec.bins[bin_index])
    return PeakPick(int(bin_index), bin_index * spec.bin_spacing_hz, abs(z), _wrapped_phase(z))


def band_indices(spec: Spectrum, f_lo: float, f_hi: float) -> tuple[int, int]:
    """Inclusive bin index range whose centres lie in ``[f_lo, f_hi]``."""
    if not f_lo < f_hi:
        raise RangeError(f"empty search range [{f_lo}, {f_hi}]")
    lo = max(0, math.ceil(f_lo / spec.bin_spacing_hz - 1e-9))
    hi = min(spec.bins.size - 1, math.floor(f_hi / spec.bin_spacing_hz + 1e-9))
    if lo > hi:
        raise RangeError(f"no spectral bins in [{f_lo}, {f_hi}] Hz")
    return lo, hi


def peak_pick(spec: Spectrum, f_lo: float, f_hi: float) -> PeakPick:
    """Largest-magnitude bin with centre in ``[f_lo, f_hi]``; ties go to the lower bin."""
    lo, hi = band_indices(spec, f_lo, f_hi)
    k = lo + int(np.argmax(np.abs(spec.bins[lo : hi + 1])))
    return pick_at(spec, k)


def vocoder_refine(prev: PeakPick, cur: PeakPick, hop_s: float) -> VocoderResult:
    """Refine ``cur.f_i`` from the phase advance of one bin across two frames.

    Candidates are ``(dphi + 2*pi*n) / (2*pi*hop_s)`` for integers ``n >= 0``
    within one grid step (``1/hop_s``) of ``f_i``; the one closest to ``f_i``
    wins, ties going to the lower frequency.
    """
    if not hop_s > 0:
        raise ConfigError(f"hop_s must be positive, got {hop_s!r}")
    if prev.bin_index != cur.bin_index:
        raise ValidationError(
            f"vocoder needs both phases at one bin, got {prev.bin_index} and {cur.bin_index}"
        )
    f_i = cur.f_i
    dphi = cur.phase - prev.phase
    step = 1.0 / hop_s
    n_lo = max(0, math.ceil(((f_i - step) * hop_s * TWO_PI - dphi) / TWO_PI))
    n_hi = math.floor(((f_i + step) * hop_s * TWO_PI - dphi) / TWO_PI)
    candidates = tuple(
        (n, (dphi + TWO_PI * n) / (TWO_PI * hop_s)) for n in range(n_lo, n_hi + 1)
    )
    if not candidates:
        return VocoderResult(f_i, -1, ())
    n_best, f_best = min(candidates, key=lambda c: (abs(c[1] - f_i), c[1]))
    return VocoderResult(f_best, n_best, candidates)
