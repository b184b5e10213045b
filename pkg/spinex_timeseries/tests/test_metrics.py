import numpy as np
import pytest

from spinex_timeseries.errors import EmptyInput, InsufficientData, LengthMismatch
from spinex_timeseries.forecaster import init_state
from spinex_timeseries.metrics import average_metrics, cross_validate, evaluate, mase
from spinex_timeseries.types import EvaluationPair, MetricRecord, TimeSeries


def test_perfect_forecast():
    actual = np.array([1.0, 3.0, 2.0, 5.0])
    record = evaluate(EvaluationPair(actual=actual, predicted=actual))
    assert record.mse == record.mae == record.rmse == record.mad == 0
    assert record.mape == pytest.approx(0)
    assert record.smape == pytest.approx(0)
    assert record.r_squared == 1
    assert record.direction_accuracy == 100
    assert record.theils_u == 1
    assert record.mase == 0
    assert record.dtw_cost == 0


def test_metric_values():
    actual = np.array([1.0, 2.0, 3.0, 4.0])
    predicted = np.array([2.0, 2.0, 2.0, 2.0])
    record = evaluate(EvaluationPair(actual=actual, predicted=predicted))

    assert record.mse == pytest.approx(1.5)
    assert record.mae == pytest.approx(1.0)
    assert record.rmse == pytest.approx(np.sqrt(1.5))
    assert record.mape == pytest.approx((1 + 0 + 1 / 3 + 1 / 2) / 4 * 100, rel=1e-6)
    assert record.r_squared == pytest.approx(1 - 6 / 5)
    assert record.direction_accuracy == 0
    assert record.theils_u == 0
    assert record.mase == pytest.approx(1.0)


def test_mase_of_lagged_forecast():
    ramp = np.arange(10.0)
    assert mase(ramp[1:], ramp[:-1]) == pytest.approx(1.0)
    steps = 3 * np.arange(20.0) - 7
    assert mase(steps[1:], steps[:-1]) == pytest.approx(1.0)
    assert np.isnan(mase([1.0], [2.0]))


def test_undefined_metrics_are_nan():
    flat = np.full(5, 3.0)
    record = evaluate(EvaluationPair(actual=flat, predicted=flat + 1))
    assert np.isnan(record.r_squared)
    assert np.isnan(record.theils_u)
    assert np.isnan(record.mase)

    single = evaluate(EvaluationPair(actual=[2.0], predicted=[1.0]))
    assert np.isnan(single.direction_accuracy)
    assert single.mae == 1
    assert single.dump()["direction_accuracy"] is None


def test_evaluate_errors():
    with pytest.raises(LengthMismatch):
        evaluate(EvaluationPair(actual=[1.0, 2.0], predicted=[1.0]))
    with pytest.raises(EmptyInput):
        evaluate(EvaluationPair(actual=[], predicted=[]))


def test_average_metrics_ignores_nan():
    actual = np.array([1.0, 2.0, 4.0])
    first = evaluate(EvaluationPair(actual=actual, predicted=actual + 1))
    second = evaluate(EvaluationPair(actual=np.full(3, 2.0), predicted=np.full(3, 5.0)))
    averaged = average_metrics([first, second])

    assert averaged.mae == pytest.approx(2.0)
    assert averaged.r_squared == pytest.approx(first.r_squared)
    assert set(averaged.dump()) == set(MetricRecord.fields())


def test_cross_validation(random_walk):
    state = init_state(random_walk, forecast_horizon=5, dynamic_window=False)
    before = random_walk.values.copy()
    window = state.window_size

    result = cross_validate(state, random_walk, splits=3)

    assert result.completed_splits == 3
    assert not result.single_split
    assert np.array_equal(random_walk.values, before)
    assert state.window_size == window
    for train_end, test_start, test_end in result.boundaries:
        assert train_end == test_start
        assert test_end - test_start <= state.forecast_horizon
    assert result.boundaries[-1][2] == len(random_walk)
    assert np.isfinite(result.metrics.mae)


def test_cross_validation_single_split():
    series = TimeSeries(np.sin(np.arange(30) / 3))
    state = init_state(series, window_size=10, forecast_horizon=3, dynamic_window=False)
    state.forecast_horizon = 12
    result = cross_validate(state, series, splits=3)
    assert result.single_split
    assert result.boundaries[0][0] == 24


def test_cross_validation_too_short():
    series = TimeSeries(np.arange(12.0))
    state = init_state(series, window_size=10, dynamic_window=False)
    state.window_size, state.forecast_horizon = 10, 5
    with pytest.raises(InsufficientData):
        cross_validate(state, series)
