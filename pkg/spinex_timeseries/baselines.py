"""
Reference forecasters for benchmarking. All of them are deterministic and produce flat or closed-form forecasts
without confidence bands.
"""
import logging
from typing import Callable

import numpy as np
from scipy.spatial.distance import cdist

from .errors import TooShort, UnknownMethod, WindowTooLarge
from .types import *


__all__ = [
    "naive_forecast", "sma_forecast", "ses_forecast", "holt_winters_forecast", "theta_forecast",
    "croston_forecast", "knn_lag_forecast", "BASELINES", "make_forecaster",
]

log = logging.getLogger(__name__)

THETA_ALPHAS = np.round(np.arange(1, 101) / 100, 2)


def _result(values) -> ForecastResult:
    return ForecastResult(values=np.asarray(values, dtype=float), provenance=Provenance.BASELINE)


def _flat(value: float, horizon: int) -> ForecastResult:
    return _result(np.full(horizon, float(value)))


def _check_horizon(horizon: int):
    if horizon < 1:
        raise ValueError(f"Horizon must be positive, got {horizon}")


def _check_smoothing(allow_zero: bool = False, **weights: float):
    for name, weight in weights.items():
        if not (0 <= weight <= 1 if allow_zero else 0 < weight <= 1):
            raise ValueError(f"Smoothing weight {name} out of range, got {weight}")


def _ses_levels(y: np.ndarray, alpha: float) -> np.ndarray:
    """ Levels M{l_t = alpha * y_t + (1 - alpha) * l_(t-1)} with M{l_1 = y_1} """
    levels = np.empty_like(y)
    levels[0] = y[0]
    for t in range(1, y.size):
        levels[t] = alpha * y[t] + (1 - alpha) * levels[t - 1]
    return levels


########################################################
#
#   Forecasters
#
########################################################

def naive_forecast(series: TimeSeries, horizon: int) -> ForecastResult:
    _check_horizon(horizon)
    return _flat(series.last, horizon)


def sma_forecast(series: TimeSeries, horizon: int, n: int = 5) -> ForecastResult:
    _check_horizon(horizon)
    if n < 1:
        raise ValueError(f"Window must be positive, got {n}")
    if n > len(series):
        raise WindowTooLarge(f"Moving average window {n} exceeds series length {len(series)}")
    return _flat(series.values[-n:].mean(), horizon)


def ses_forecast(series: TimeSeries, horizon: int, alpha: float = 0.3) -> ForecastResult:
    _check_horizon(horizon)
    _check_smoothing(alpha=alpha)
    return _flat(_ses_levels(series.values, alpha)[-1], horizon)


def holt_winters_forecast(
    series: TimeSeries, horizon: int, alpha: float = 0.3, beta: float = 0.1, gamma: float = 0.1, period: int = 12
) -> ForecastResult:
    """
    Additive Holt-Winters. The first period initializes the state: the level at its end is the period mean advanced
    by the initial trend, the trend is the mean per-position change between the first two periods, and the seasonal
    terms are the detrended deviations of the first period from its mean.
    """
    _check_horizon(horizon)
    _check_smoothing(alpha=alpha)
    _check_smoothing(allow_zero=True, beta=beta, gamma=gamma)
    y = series.values
    if period < 2:
        raise ValueError(f"Seasonal period must be at least 2, got {period}")
    if y.size < 2 * period:
        raise TooShort(f"Holt-Winters needs two full periods ({2 * period} values), got {y.size}")

    first_mean = y[:period].mean()
    trend = np.mean(y[period:2 * period] - y[:period]) / period
    phase_offsets = np.arange(period) - (period - 1) / 2
    seasonal = y[:period] - (first_mean + trend * phase_offsets)
    level = first_mean + trend * (period - 1) / 2

    for t in range(period, y.size):
        previous_level = level
        season = seasonal[t % period]
        level = alpha * (y[t] - season) + (1 - alpha) * (level + trend)
        trend = beta * (level - previous_level) + (1 - beta) * trend
        seasonal[t % period] = gamma * (y[t] - level) + (1 - gamma) * season

    steps = np.arange(horizon)
    return _result(level + (steps + 1) * trend + seasonal[(y.size + steps) % period])


def theta_forecast(series: TimeSeries, horizon: int) -> ForecastResult:
    """
    Two-line Theta method. The theta=0 line is the least-squares trend; the theta=2 line doubles the curvature
    around it. The curvature part is smoothed by SES (alpha from a fixed grid by in-sample one-step SSE) and carried
    flat on top of the continued trend. The forecast averages both extrapolations.
    """
    _check_horizon(horizon)
    y = series.values
    if y.size < 4:
        raise TooShort(f"Theta needs at least 4 values, got {y.size}")

    t = np.arange(y.size)
    slope, intercept = np.polyfit(t, y, 1)
    trendline = intercept + slope * t
    curvature = 2 * (y - trendline)

    best_alpha, best_sse = THETA_ALPHAS[0], np.inf
    for alpha in THETA_ALPHAS:
        levels = _ses_levels(curvature, alpha)
        sse = np.sum((curvature[1:] - levels[:-1]) ** 2)
        if sse < best_sse:
            best_alpha, best_sse = alpha, sse

    future = intercept + slope * np.arange(y.size, y.size + horizon)
    theta_two = future + _ses_levels(curvature, best_alpha)[-1]
    log.debug(f"Theta smoothing weight {best_alpha}")
    return _result((future + theta_two) / 2)


def croston_forecast(series: TimeSeries, horizon: int, alpha: float = 0.3) -> ForecastResult:
    """ Ratio of the smoothed non-zero demand sizes to the smoothed intervals between them """
    _check_horizon(horizon)
    _check_smoothing(alpha=alpha)
    y = series.values
    demand = np.flatnonzero(y != 0)
    if demand.size == 0:
        return _flat(0.0, horizon)

    sizes = y[demand]
    intervals = np.diff(demand, prepend=-1).astype(float)
    size_level = _ses_levels(sizes, alpha)[-1]
    interval_level = _ses_levels(intervals, alpha)[-1]
    return _flat(size_level / interval_level, horizon)


def knn_lag_forecast(series: TimeSeries, horizon: int, k: int = 5, lag: int = 10) -> ForecastResult:
    """
    Average the continuations of the C{k} historical lag windows closest (Euclidean) to the latest lag window.
    Only windows followed by a complete horizon are candidates; ties go to the earlier window.
    """
    _check_horizon(horizon)
    y = series.values
    if k < 1 or lag < 1:
        raise ValueError(f"k and lag must be positive, got k={k}, lag={lag}")
    if y.size < lag + horizon + 1:
        raise TooShort(f"KNN with lag {lag} and horizon {horizon} needs {lag + horizon + 1} values, got {y.size}")

    windows = np.lib.stride_tricks.sliding_window_view(y, lag)
    candidates = windows[:y.size - lag - horizon + 1]
    distances = cdist(candidates, y[None, -lag:])[:, 0]
    nearest = np.lexsort((np.arange(distances.size), distances))[:k]

    continuations = y[nearest[:, np.newaxis] + lag + np.arange(horizon)]
    return _result(continuations.mean(axis=0))


########################################################
#
#   Registry
#
########################################################

Forecaster = Callable[[TimeSeries, int], ForecastResult]

BASELINES: dict[str, Callable[..., ForecastResult]] = {
    "naive": naive_forecast,
    "sma": sma_forecast,
    "ses": ses_forecast,
    "holt_winters": holt_winters_forecast,
    "theta": theta_forecast,
    "croston": croston_forecast,
    "knn_lag": knn_lag_forecast,
}


def make_forecaster(spec: BaselineSpec) -> Forecaster:
    """ Bind the parameters of a spec to its forecaster """
    try:
        function = BASELINES[spec.kind]
    except KeyError:
        raise UnknownMethod(f"Unknown baseline {spec.kind!r}, choose from {', '.join(BASELINES)}")

    def forecast(series: TimeSeries, horizon: int) -> ForecastResult:
        return function(series, horizon, **spec.parameters)

    forecast.__name__ = spec.kind
    return forecast
