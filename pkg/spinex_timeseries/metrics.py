import logging

import numpy as np
from sklearn.model_selection import TimeSeriesSplit

from .errors import EmptyInput, EmptyResult, InsufficientData, LengthMismatch, SpinexError
from .forecaster import predict
from .similarity import squared_dtw_distance
from .types import *


__all__ = ["evaluate", "mase", "average_metrics", "cross_validate"]

log = logging.getLogger(__name__)

PERCENT_EPSILON = 1e-8


def mase(actual: np.ndarray, predicted: np.ndarray) -> float:
    """ Mean absolute error scaled by the mean absolute one-step change of the actual values, NaN on a flat scale """
    actual = np.asarray(actual, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if actual.size < 2:
        return np.nan
    scale = np.mean(np.abs(np.diff(actual)))
    if scale == 0:
        return np.nan
    return float(np.mean(np.abs(actual - predicted)) / scale)


def evaluate(pair: EvaluationPair) -> MetricRecord:
    """
    Score a forecast against the actual values. Metrics that are undefined for the pair (R² on constant actuals,
    Theil's U without actual changes, anything step based on a single value) are NaN.
    """
    actual, predicted = pair.actual, pair.predicted
    if actual.size != predicted.size:
        raise LengthMismatch(f"Actual and predicted arrays must have the same length: {actual.size} != {predicted.size}")
    if actual.size == 0:
        raise EmptyInput("Evaluation needs at least one value")

    error = actual - predicted
    mse = float(np.mean(error ** 2))
    mae = float(np.mean(np.abs(error)))
    mape = float(np.mean(np.abs(error / (actual + PERCENT_EPSILON))) * 100)
    smape = float(np.mean(2 * np.abs(predicted - actual) / (np.abs(actual) + np.abs(predicted) + PERCENT_EPSILON)) * 100)

    total = np.sum((actual - actual.mean()) ** 2)
    r_squared = float(1 - np.sum(error ** 2) / total) if total > 0 else np.nan

    if actual.size >= 2:
        actual_changes, predicted_changes = np.diff(actual), np.diff(predicted)
        direction = float(np.mean(np.sign(actual_changes) == np.sign(predicted_changes)) * 100)
        denominator = np.sum(actual_changes ** 2)
        theils_u = float(np.sqrt(np.sum(predicted_changes ** 2) / denominator)) if denominator != 0 else np.nan
    else:
        direction = theils_u = np.nan

    return MetricRecord(
        mse=mse,
        mae=mae,
        rmse=float(np.sqrt(mse)),
        mape=mape,
        smape=smape,
        r_squared=r_squared,
        direction_accuracy=direction,
        theils_u=theils_u,
        mase=mase(actual, predicted),
        dtw_cost=squared_dtw_distance(actual, predicted),
        mad=mae,
    )


def average_metrics(records: list[MetricRecord]) -> MetricRecord:
    """ Per-metric mean over the records, ignoring NaN entries """
    averaged = {}
    for name in MetricRecord.fields():
        values = np.array([getattr(record, name) for record in records], dtype=float)
        values = values[np.isfinite(values)]
        averaged[name] = float(values.mean()) if values.size else np.nan
    return MetricRecord(**averaged)


def _split_plan(length: int, window: int, horizon: int, splits: int) -> tuple[list[tuple[int, int, int]], bool]:
    """ (train end, test start, test end) per split; a single 80/20 split when fewer than two splits fit """
    splits = min(splits, (length - window) // horizon)
    if splits < 2:
        train_size = int(0.8 * length)
        return [(train_size, train_size, length)], True

    plan = []
    for train_index, test_index in TimeSeriesSplit(n_splits=splits, test_size=horizon).split(np.arange(length)):
        plan.append((int(train_index[-1]) + 1, int(test_index[0]), int(test_index[-1]) + 1))
    return plan, False


def cross_validate(state: EngineState, series: TimeSeries, splits: int = 3) -> CrossValidationResult:
    """
    Time-ordered validation: every split forecasts from a training prefix and is scored against the observations
    right after it. Splits whose training prefix is shorter than the window are skipped.

    @return: The per-metric average over the completed splits together with the split boundaries
    """
    length, window, horizon = len(series), state.window_size, state.forecast_horizon
    if length < window + horizon:
        raise InsufficientData(f"Cross-validation needs at least {window + horizon} observations, got {length}")

    plan, single = _split_plan(length, window, horizon, splits)
    if single:
        log.warning("Not enough data for multiple splits, performing single train-test split")

    saved_window, saved_threshold = state.window_size, state.threshold
    records, boundaries = [], []
    try:
        for train_end, test_start, test_end in plan:
            if train_end < window:
                log.warning(f"Train set of {train_end} observations is too small for window size {window}, skipping split")
                continue

            state.clear_caches()
            try:
                forecast = predict(state, series[:train_end])
            except SpinexError as e:
                log.warning(f"Insufficient data to predict for split ending at {train_end}: {e}")
                continue

            actual = series.values[test_start:test_end][:len(forecast)]
            if actual.size == 0:
                continue
            records.append(evaluate(EvaluationPair(actual=actual, predicted=forecast.values[:actual.size])))
            boundaries.append((train_end, test_start, test_start + actual.size))
    finally:
        state.clear_caches()
        state.window_size, state.threshold = saved_window, saved_threshold

    if not records:
        raise EmptyResult("No valid predictions could be made across splits")

    return CrossValidationResult(
        metrics=average_metrics(records),
        completed_splits=len(records),
        boundaries=boundaries,
        single_split=single,
    )
