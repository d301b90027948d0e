import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcghr.errors import ConfigError, ValidationError
from bcghr.preprocess import design_bandpass, filtfilt

from conftest import FS, tone


def butterworth_bandpass_gain(f, lo=0.7, hi=10.0, order=4, fs=FS):
    """Closed-form |H| of the bilinear Butterworth band-pass (pre-warped edges)."""
    w = math.tan(math.pi * f / fs)
    wl, wh = math.tan(math.pi * lo / fs), math.tan(math.pi * hi / fs)
    x = (w * w - wl * wh) / (w * (wh - wl))
    return 1.0 / math.sqrt(1.0 + x ** (2 * order))


def polynomial_gain(spec, f):
    z = np.exp(2j * np.pi * f / spec.design_rate_hz)
    return abs(np.polyval(spec.feedforward_coeffs, z) / np.polyval(spec.feedback_coeffs, z))


@pytest.fixture(scope="module")
def spec():
    return design_bandpass(0.7, 10.0, FS, 4)


def test_design_is_stable_with_unity_midband(spec):
    assert spec.is_stable()
    assert np.all(np.abs(spec.poles()) < 1)
    assert np.all(np.abs(np.roots(spec.feedback_coeffs)) < 1)
    assert polynomial_gain(spec, 3.0) == pytest.approx(1.0, rel=0.01)
    assert abs(spec.response(3.0)) == pytest.approx(1.0, rel=0.01)


@pytest.mark.parametrize("edge", [0.7, 10.0])
def test_edges_are_minus_3db(spec, edge):
    assert 20 * np.log10(abs(spec.response(edge))) == pytest.approx(-3.0103, abs=1e-3)


@pytest.mark.parametrize("f", [0.2, 0.5, 1.0, 3.0, 7.0, 15.0, 40.0])
def test_response_matches_closed_form(spec, f):
    assert abs(spec.response(f)) == pytest.approx(butterworth_bandpass_gain(f), rel=1e-6)


@pytest.mark.parametrize("args", [(10, 0.7, 225, 4), (0.7, 112.5, 225, 4), (0.7, 10, 225, 0), (0, 10, 225, 4)])
def test_design_rejects_bad_arguments(args):
    with pytest.raises(ConfigError):
        design_bandpass(*args)


def test_dc_removed(spec):
    y = filtfilt(np.full(int(30 * FS), 3.0), spec)
    assert np.max(np.abs(y)) < 1e-6


def test_zero_in_zero_out(spec):
    assert np.array_equal(filtfilt(np.zeros(500), spec), np.zeros(500))


def test_too_short(spec):
    with pytest.raises(ValidationError):
        filtfilt(np.ones(12), spec)


def xcorr_lag(x, y):
    c = np.correlate(y, x, mode="full")
    return int(np.argmax(c)) - (len(x) - 1)


@pytest.mark.parametrize("f", [1.0, 3.0, 7.0])
def test_in_band_tone_has_zero_lag(spec, f):
    _, x = tone(f)
    y = filtfilt(x, spec)
    assert y.shape == x.shape
    assert xcorr_lag(x, y) == 0


def test_respiration_band_attenuated(spec):
    _, x = tone(0.2)
    y = filtfilt(x, spec)
    rms = lambda v: np.sqrt(np.mean(v ** 2))
    assert rms(y) < 0.15 * rms(x)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-5, 5), st.floats(-5, 5))
def test_linearity(spec, seed, a, b):
    rng = np.random.default_rng(seed)
    x, y = rng.standard_normal((2, 2000))
    lhs = filtfilt(a * x + b * y, spec)
    rhs = a * filtfilt(x, spec) + b * filtfilt(y, spec)
    scale = max(1.0, np.max(np.abs(rhs)))
    assert np.max(np.abs(lhs - rhs)) <= 1e-9 * scale
    assert np.all(np.isfinite(lhs))
