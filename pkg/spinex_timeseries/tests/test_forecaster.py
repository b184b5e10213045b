import numpy as np
import pytest
from numpy.testing import assert_allclose

from spinex_timeseries.errors import InsufficientData, TooShort, UnknownMethod
from spinex_timeseries.forecaster import (
    decompose, dynamic_threshold, fallback_predict, fallback_similarity, find_similar_segments, init_state, predict,
    record_performance, segments_for, tune_hyperparameters,
)
from spinex_timeseries.types import EngineState, Provenance, TimeSeries


########################################################
#
#   State
#
########################################################

def test_init_state_defaults():
    series = TimeSeries(np.arange(200.0))
    state = init_state(series, dynamic_window=False)
    assert state.window_size == 20
    assert state.forecast_horizon == 1
    assert state.similarity_methods == ("cosine", "euclidean", "dtw")
    assert state.threshold == 0.5
    assert len(state.recent_errors) == 0


def test_init_state_clamps():
    series = TimeSeries(np.arange(200.0))
    state = init_state(series, window_size=500, forecast_horizon=50, dynamic_window=False)
    assert state.window_size == 100
    assert state.forecast_horizon == 20


def test_init_state_adaptive_window(sine_series):
    state = init_state(sine_series, window_size=60)
    assert 2 <= state.window_size <= len(sine_series) // 8


def test_init_state_rejects_unknown_methods():
    with pytest.raises(UnknownMethod):
        init_state(TimeSeries(np.arange(50.0)), similarity_methods=["cosine", "manhattan"])


def test_record_performance_keeps_last_hundred():
    state = EngineState(window_size=5, forecast_horizon=1)
    for i in range(150):
        record_performance(state, float(i), i / 150)
    assert len(state.recent_errors) == 100
    assert len(state.recent_similarity_scores) == 100
    assert state.recent_errors[0] == 50
    assert state.recent_errors[-1] == 149


def test_segment_cache_is_reused(random_walk):
    state = init_state(random_walk, dynamic_window=False)
    first = segments_for(state, random_walk, 12)
    assert segments_for(state, random_walk, 12) is first
    assert segments_for(state, random_walk, 13) is not first


########################################################
#
#   Similarity profile and threshold
#
########################################################

def test_profile_offsets_match_primary_window(sawtooth_series):
    state = init_state(sawtooth_series, forecast_horizon=20, dynamic_window=False)
    profile = find_similar_segments(state, sawtooth_series)
    assert profile.window_size == state.window_size == 20

    # the longest window (40) bounds the number of aligned scores
    assert len(profile) == 200 - 40
    assert profile.start_index(0) == 20
    assert np.all(np.isfinite(profile.scores))


def test_profile_single_level(random_walk):
    state = init_state(random_walk, window_size=15, dynamic_window=False, multi_level=False)
    profile = find_similar_segments(state, random_walk)
    assert len(profile) == len(random_walk) - 15
    assert profile.offset == 0


def test_fallback_similarity():
    profile = fallback_similarity(TimeSeries([1.0, 2.0, 3.0]))
    assert profile.source == "autocorrelation"
    assert_allclose(profile.scores, [1.0, 8 / 14, 3 / 14])

    profile = fallback_similarity(TimeSeries(np.zeros(4)))
    assert_allclose(profile.scores, [1.0, 0.0, 0.0, 0.0])

    with pytest.raises(TooShort):
        fallback_similarity(TimeSeries([1.0]))


def test_dynamic_threshold():
    state = EngineState(window_size=5, forecast_horizon=1)
    scores = np.arange(100.0)
    assert dynamic_threshold(state, scores) == pytest.approx(49.5 + np.sqrt((100 ** 2 - 1) / 12))

    # only one score above mean + std
    assert dynamic_threshold(state, np.r_[np.zeros(20), 1.0]) == pytest.approx(0.0)

    state.dynamic_threshold = False
    assert dynamic_threshold(state, scores) == pytest.approx(np.percentile(scores, 95))

    with pytest.raises(ValueError):
        dynamic_threshold(state, np.array([]))


########################################################
#
#   Prediction
#
########################################################

def test_periodic_recall(sawtooth_series):
    state = init_state(sawtooth_series, forecast_horizon=20, dynamic_window=False)
    result = predict(state, sawtooth_series)

    assert result.provenance == Provenance.SIMILARITY
    assert len(result) == 20
    truth = (np.arange(20) % 20) / 20 * 10
    assert_allclose(result.values - result.values[0], truth - truth[0], atol=1e-6)


def test_forecast_starts_at_last_observation():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        t = np.arange(300)
        series = TimeSeries(np.sin(2 * np.pi * t / rng.integers(10, 40)) + rng.normal(scale=0.2, size=t.size))
        state = init_state(series, forecast_horizon=5, dynamic_window=False, seed=seed)
        result = predict(state, series)
        assert len(result) == 5
        if result.provenance == Provenance.SIMILARITY:
            assert result.values[0] == series.last


@pytest.mark.parametrize("length", [4, 12, 60, 250])
def test_predict_returns_horizon(length, rng):
    series = TimeSeries(np.cumsum(rng.normal(size=length)))
    state = init_state(series, forecast_horizon=3)
    result = predict(state, series)
    assert len(result) == state.forecast_horizon
    assert np.all(np.isfinite(result.values))
    assert len(state.recent_errors) == 1


def test_predict_is_deterministic(random_walk):
    first = predict(init_state(random_walk, forecast_horizon=10, seed=3), random_walk)
    second = predict(init_state(random_walk, forecast_horizon=10, seed=3), random_walk)
    assert first.provenance == second.provenance
    assert_allclose(first.values, second.values)


def test_predict_too_short():
    series = TimeSeries([1.0, 2.0, 3.0])
    with pytest.raises(TooShort):
        predict(EngineState(window_size=1, forecast_horizon=1), series)


########################################################
#
#   Fallback
#
########################################################

def test_fallback_on_linear_series():
    series = TimeSeries(0.5 * np.arange(200))
    state = init_state(series, forecast_horizon=5, dynamic_window=False)
    result = fallback_predict(state, series, num_points=5)

    assert result.provenance == Provenance.FALLBACK
    assert result.has_bands
    assert_allclose(result.values, 0.5 * np.arange(200, 205), rtol=0.02)
    assert np.all(result.ci_lower <= result.values + 1e-9)
    assert np.all(result.values <= result.ci_upper + 1e-9)


def test_fallback_is_seeded(sine_series):
    noisy = TimeSeries(sine_series.values + np.random.default_rng(0).normal(scale=0.3, size=len(sine_series)))
    first = fallback_predict(init_state(noisy, forecast_horizon=10, seed=5), noisy)
    second = fallback_predict(init_state(noisy, forecast_horizon=10, seed=5), noisy)
    assert_allclose(first.values, second.values)
    assert_allclose(first.ci_upper, second.ci_upper)
    assert np.all(first.ci_lower < first.ci_upper)


def test_decompose(sine_series):
    components = decompose(sine_series, num_points=20, num_seasons=2)
    assert len(components.seasonal_periods) == 2
    assert len(set(components.seasonal_periods)) == 2
    for period, component in zip(components.seasonal_periods, components.seasonal_components):
        assert component.size == period
    assert components.residuals.size == components.trend.size
    assert components.trend_polynomial.size == 4

    document = components.dump()
    assert document["trend_window"] == components.trend_window


def test_decompose_replaces_residual_outliers():
    rng = np.random.default_rng(2)
    values = rng.normal(scale=0.1, size=300)
    values[150] = 25.0
    components = decompose(TimeSeries(values), num_points=10, num_seasons=1)
    assert components.anomaly_mask.any()
    assert np.max(np.abs(components.residuals)) < 5


def test_decompose_errors():
    with pytest.raises(InsufficientData):
        decompose(TimeSeries(np.arange(9.0)), num_points=5)
    with pytest.raises(ValueError):
        decompose(TimeSeries(np.arange(100.0)), num_points=5, num_seasons=5)


def test_tune_hyperparameters(sine_series):
    state = init_state(sine_series, forecast_horizon=10)
    assert tune_hyperparameters(state, sine_series) in (1, 2, 3, 4)


@pytest.fixture
def two_seasons():
    t = np.arange(300)
    return TimeSeries(np.sin(2 * np.pi * t / 7) + np.sin(2 * np.pi * t / 30))


def test_tune_hyperparameters_minimizes_trailing_mse(two_seasons):
    state = init_state(two_seasons, forecast_horizon=20, dynamic_window=False)
    errors = []
    for num_seasons in range(1, 5):
        predicted = fallback_predict(state, two_seasons, num_points=20, num_seasons=num_seasons).values
        errors.append(np.mean((two_seasons.values[-predicted.size:] - predicted) ** 2))
    assert tune_hyperparameters(state, two_seasons) == 1 + int(np.argmin(errors))


def test_tuning_lag_search_stays_below_twenty(two_seasons):
    components = decompose(two_seasons, num_points=20, num_seasons=4)
    assert components.seasonal_periods
    assert all(1 <= period < 20 for period in components.seasonal_periods)
    assert 30 not in components.seasonal_periods
