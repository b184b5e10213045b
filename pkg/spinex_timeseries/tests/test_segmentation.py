import numpy as np
import pytest
from numpy.testing import assert_allclose

from spinex_timeseries.errors import TooShort
from spinex_timeseries.forecaster import record_performance
from spinex_timeseries.segmentation import adaptive_window_size, adjust_dynamic_parameters, extract_segments
from spinex_timeseries.types import EngineState, TimeSeries


def test_segment_count_and_normalization(rng):
    series = TimeSeries(rng.normal(size=120) * 5 + 3)
    segments = extract_segments(series, 12)
    assert segments.rows.shape == (109, 12)
    assert len(segments) == 120 - 12 + 1
    assert np.all(np.abs(segments.rows.mean(axis=1)) < 1e-9)
    assert np.all(np.abs(segments.rows.std(axis=1) - 1) < 1e-6)

    # row i starts at source index i
    window = series.values[37:49]
    assert_allclose(segments.rows[37], (window - window.mean()) / (window.std() + 1e-8))


def test_small_series():
    segments = extract_segments(TimeSeries([1.0, 2.0, 3.0, 4.0]), 2)
    assert len(segments) == 3
    assert_allclose(segments.rows, [[-1, 1]] * 3, atol=1e-7)

    segments = extract_segments(TimeSeries(np.arange(6.0)), 10)
    assert segments.window_size == 3
    assert len(segments) == 4


def test_constant_windows_are_zero():
    series = TimeSeries([5.0, 5.0, 5.0, 1.0, 2.0, 3.0])
    segments = extract_segments(series, 3)
    assert np.all(segments.rows[0] == 0)
    assert np.all(np.isfinite(segments.rows))


def test_renormalization_is_stable(rng):
    rows = extract_segments(TimeSeries(rng.normal(size=50)), 8).rows
    again = (rows - rows.mean(axis=1, keepdims=True)) / (rows.std(axis=1, keepdims=True) + 1e-8)
    assert np.max(np.abs(again - rows)) < 1e-6


def test_extract_too_short():
    with pytest.raises(TooShort):
        extract_segments(TimeSeries([1.0]), 1)


def test_adaptive_window_constant_series():
    assert adaptive_window_size(TimeSeries(np.full(80, 5.0))) == 4


def test_adaptive_window_long_ramp():
    # no seasonality, base window 25 scaled by the coefficient of variation of 1..2000
    assert adaptive_window_size(TimeSeries(np.arange(1.0, 2001.0))) == 39


@pytest.mark.parametrize("length", [2, 5, 16, 50, 99, 400, 1500])
def test_adaptive_window_clamp(length, rng):
    window = adaptive_window_size(TimeSeries(rng.normal(size=length)))
    assert 2 <= window
    assert window <= max(2, length // 8)


def test_adaptive_window_is_monotone_in_length():
    windows = [adaptive_window_size(TimeSeries(np.full(n, 3.0))) for n in range(40, 2000, 60)]
    assert windows == sorted(windows)


def test_threshold_defaults_without_history():
    state = EngineState(window_size=5, forecast_horizon=1)
    adjust_dynamic_parameters(state, TimeSeries(np.arange(30.0)))
    assert state.threshold == 0.5


def test_threshold_from_history():
    state = EngineState(window_size=5, forecast_horizon=1)
    record_performance(state, 1.0, 0.2)
    record_performance(state, np.nan, 0.4)
    record_performance(state, 3.0, np.nan)
    adjust_dynamic_parameters(state, TimeSeries(np.arange(30.0)))
    # errors [1, 3]: 2 + 1; similarities [0.2, 0.4]: 0.3 + 0.1
    assert state.threshold == pytest.approx(3.4)


@pytest.mark.parametrize("values", [
    np.random.default_rng(0).normal(size=100) * 10,
    np.full(100, 2.0),
])
def test_window_adjustment(values):
    state = EngineState(window_size=5, forecast_horizon=1)
    adjust_dynamic_parameters(state, TimeSeries(values))
    assert state.window_size == 50


def test_window_kept_without_dynamic_window():
    state = EngineState(window_size=7, forecast_horizon=1, dynamic_window=False)
    adjust_dynamic_parameters(state, TimeSeries(np.random.default_rng(1).normal(size=100)))
    assert state.window_size == 7


@pytest.mark.parametrize("length", [20, 33, 100, 500])
def test_adjusted_window_bounds(length, rng):
    state = EngineState(window_size=3, forecast_horizon=1)
    adjust_dynamic_parameters(state, TimeSeries(rng.normal(size=length) * rng.uniform(0.01, 3)))
    assert 10 <= state.window_size <= length // 2
