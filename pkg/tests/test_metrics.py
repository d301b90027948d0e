import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcghr.errors import UndefinedCorrelationError, ValidationError
from bcghr.io import ReferenceAnnotation
from bcghr.metrics import (PairedSeries, bland_altman, evaluate, mae, pearson_r, reference_hr,
                           std_abs_err)


def test_reference_hr_examples():
    uniform = ReferenceAnnotation(np.arange(0, 31, 1.0))
    assert reference_hr(uniform, [(0, 30)]) == pytest.approx([60.0])
    fast = ReferenceAnnotation(np.arange(0, 30.01, 0.8))
    assert reference_hr(fast, [(0, 30)]) == pytest.approx([75.0])
    uneven = ReferenceAnnotation([0.0, 1.0, 2.2])
    assert reference_hr(uneven, [(0, 30)]) == pytest.approx([54.545454545], rel=1e-9)


def test_reference_hr_needs_two_peaks():
    ann = ReferenceAnnotation([0.5, 40.0])
    with pytest.raises(ValidationError, match="frame 1"):
        reference_hr(ann, [(0, 50), (10, 30)])


def test_mae_std_examples():
    p = PairedSeries([70, 72, 74], [71, 71, 74])
    assert mae(p) == pytest.approx(2 / 3)
    assert std_abs_err(p) == pytest.approx(math.sqrt(2) / 3)
    _, diffs, (lo, hi) = bland_altman(p)
    np.testing.assert_array_equal(diffs, [1, 1, 0])
    assert (lo, hi) == pytest.approx((-0.2572862, 1.5906195), abs=1e-6)


def test_identity():
    p = PairedSeries([60, 70, 80], [60, 70, 80])
    assert mae(p) == 0 and std_abs_err(p) == 0
    assert pearson_r(p) == pytest.approx(1.0)
    _, diffs, limits = bland_altman(p)
    assert np.all(diffs == 0) and limits == (0.0, 0.0)


def test_anticorrelation():
    true = np.array([60.0, 65.0, 72.0, 90.0])
    assert pearson_r(PairedSeries(true, 200 - true)) == pytest.approx(-1.0)


def test_undefined_correlation():
    with pytest.raises(UndefinedCorrelationError):
        pearson_r(PairedSeries([60, 60, 60], [61, 62, 63]))
    with pytest.raises(UndefinedCorrelationError):
        pearson_r(PairedSeries([60], [61]))
    rep = evaluate(PairedSeries([60, 60], [61, 62]))
    assert math.isnan(rep.pearson_r)
    assert '"pearson_r": null' in rep.to_json()


def test_paired_series_validation():
    with pytest.raises(ValidationError):
        PairedSeries([60, 70], [60])
    with pytest.raises(ValidationError):
        PairedSeries([], [])
    with pytest.raises(ValidationError):
        PairedSeries([60, -1], [60, 70])
    with pytest.raises(ValidationError):
        PairedSeries([60, np.nan], [60, 70])


bpm = st.floats(40, 200, allow_nan=False)


@settings(max_examples=60)
@given(st.lists(st.tuples(bpm, bpm), min_size=3, max_size=50), st.floats(-30, 30))
def test_metric_properties(pairs, shift):
    true, est = map(np.array, zip(*pairs))
    p = PairedSeries(true, est)
    m, s = mae(p), std_abs_err(p)
    assert m >= 0 and s >= 0
    assert (m == 0) == bool(np.all(true == est))
    shifted = PairedSeries(true + shift + 50, est + shift + 50)
    assert mae(shifted) == pytest.approx(m, abs=1e-9)
    assert std_abs_err(shifted) == pytest.approx(s, abs=1e-9)
    lo, hi = bland_altman(p)[2]
    assert lo <= m <= hi


@settings(max_examples=60)
@given(st.lists(st.tuples(bpm, bpm), min_size=3, max_size=50),
       st.floats(0.1, 10), st.floats(-20, 20), st.floats(0.1, 10), st.floats(-20, 20))
def test_pearson_affine_invariance(pairs, a, b, c, d):
    true, est = map(np.array, zip(*pairs))
    if np.ptp(true) < 1e-6 or np.ptp(est) < 1e-6:
        return
    r = pearson_r(PairedSeries(true, est))
    assert -1 <= r <= 1
    r2 = pearson_r(PairedSeries(a * true + b + 100, c * est + d + 100))
    assert r2 == pytest.approx(r, abs=1e-9)
