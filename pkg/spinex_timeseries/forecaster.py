"""
The similarity forecasting pipeline: multi-level similarity profiles, dynamic thresholds, similarity-weighted
forecasts aligned to the last observation, and the decomposition fallback with Monte-Carlo confidence bands.
"""
import logging
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import minimize_scalar

from .core import content_digest, seeded_rng
from .errors import InsufficientData, SpinexError, TooShort, UnknownMethod
from .segmentation import adaptive_window_size, adjust_dynamic_parameters, extract_segments
from .similarity import reference_similarity
from .types import *


__all__ = [
    "init_state", "segments_for", "find_similar_segments", "fallback_similarity", "dynamic_threshold", "predict",
    "decompose", "fallback_predict", "tune_hyperparameters", "record_performance",
    "DTW_SEGMENT_LIMIT", "SELECTION_PERCENTILES", "MONTE_CARLO_PATHS",
]

log = logging.getLogger(__name__)

DTW_SEGMENT_LIMIT = 500
SELECTION_PERCENTILES = (95, 90, 85, 80, 75)
MIN_CANDIDATES = 3
MONTE_CARLO_PATHS = 1000
TUNING_POINTS = 20


def init_state(
    series: TimeSeries,
    window_size: int | None = None,
    forecast_horizon: int = 1,
    similarity_methods: Sequence[str] | None = None,
    dynamic_window: bool = True,
    multi_level: bool = True,
    dynamic_threshold: bool = True,
    seed: int = 0,
) -> EngineState:
    """
    Create the engine state for a series with the constructor defaults of the method.

    @param series: The series the engine will forecast
    @param window_size: Explicit window, clamped to half the series. Without one, the larger of 10 and a tenth of the
        series is used. Ignored when C{dynamic_window} is on, the adaptive window wins
    @param forecast_horizon: Requested horizon, clamped to the larger of 1 and a tenth of the series
    @param similarity_methods: Ordered methods, defaults to cosine, euclidean and dtw
    """
    length = len(series)
    if forecast_horizon < 1:
        raise ValueError(f"Forecast horizon must be positive, got {forecast_horizon}")
    if window_size is not None and window_size < 1:
        raise ValueError(f"Window size must be positive, got {window_size}")

    methods = tuple(dict.fromkeys(similarity_methods or ("cosine", "euclidean", "dtw")))
    for method in methods:
        if method not in SIMILARITY_METHODS:
            raise UnknownMethod(f"Invalid similarity method: {method!r}")

    if window_size is None:
        window = max(10, length // 10)
    else:
        window = min(window_size, length // 2)
    if dynamic_window and length >= 2:
        window = adaptive_window_size(series)
    window = max(1, min(window, max(1, length // 2)))

    return EngineState(
        window_size=window,
        forecast_horizon=max(1, min(forecast_horizon, length // 10)),
        similarity_methods=methods,
        dynamic_window=dynamic_window,
        multi_level=multi_level,
        dynamic_threshold=dynamic_threshold,
        seed=seed,
    )


def record_performance(state: EngineState, error: float, similarity: float) -> EngineState:
    """ Append to both performance buffers, which keep the last 100 records """
    state.recent_errors.append(float(error))
    state.recent_similarity_scores.append(float(similarity))
    return state


########################################################
#
#   Similarity profile
#
########################################################

def segments_for(state: EngineState, series: TimeSeries, window_size: int) -> SegmentMatrix:
    """ L{extract_segments} through the state's segment cache """
    key = (content_digest(series.values), window_size)
    segments = state.segment_cache.get(key)
    if segments is None:
        segments = extract_segments(series, window_size)
        state.segment_cache[key] = segments
    return segments


def _reference_scores(state: EngineState, segments: SegmentMatrix, method: str) -> np.ndarray:
    key = (content_digest(segments), method)
    scores = state.similarity_cache.get(key)
    if scores is None:
        scores = reference_similarity(segments, method)
        state.similarity_cache[key] = scores
    return scores


def _window_levels(state: EngineState, length: int) -> list[int]:
    window = state.window_size
    if not state.multi_level:
        return [window]
    return [max(2, window // 2), window, min(length // 4, window * 2)]


def find_similar_segments(state: EngineState, series: TimeSeries) -> SimilarityProfile:
    """
    Similarity of every historical segment to the latest segment, averaged over the configured methods and, with
    multi-level windows, over half, primary and double window sizes. Profiles of different window sizes are aligned
    at their segment end. Falls back to L{fallback_similarity} when no window size yields a profile.
    """
    length = len(series)
    levels = []
    for window in _window_levels(state, length):
        if window < 2:
            log.debug(f"Window size {window} is too small, skipping")
            continue

        segments = segments_for(state, series, window)
        if len(segments) < 2:
            log.debug(f"Not enough segments for window size {window}, skipping")
            continue

        method_scores = []
        for method in state.similarity_methods:
            if method == "dtw" and len(segments) > DTW_SEGMENT_LIMIT:
                log.debug(f"DTW skipped for large dataset with {len(segments)} segments")
                continue
            try:
                method_scores.append(_reference_scores(state, segments, method))
            except SpinexError as e:
                log.warning(f"Error calculating similarity for method {method!r}: {e}")

        if not method_scores:
            log.debug(f"No valid similarity methods for window size {window}, skipping")
            continue
        levels.append(np.mean(np.vstack(method_scores), axis=0))

    if not levels:
        log.info("No similarities found for any window size, using autocorrelation similarity")
        return fallback_similarity(series)

    shortest = min(level.size for level in levels)
    combined = np.mean(np.vstack([level[-shortest:] for level in levels]), axis=0)
    if not np.all(np.isfinite(combined)):
        log.debug("Replacing non-finite similarity scores with 0")
        combined = np.where(np.isfinite(combined), combined, 0.0)

    # Score i belongs to the segments ending at index length - shortest + i
    offset = length - shortest - state.window_size
    return SimilarityProfile(scores=combined, window_size=state.window_size, offset=offset)


def fallback_similarity(series: TimeSeries) -> SimilarityProfile:
    """ Autocorrelation of the raw series normalized by its lag-0 value; score C{k} is lag C{k} """
    if len(series) < 2:
        raise TooShort("Autocorrelation similarity needs at least two observations")
    x = series.values
    acf = np.correlate(x, x, mode="full")[x.size - 1:]
    if acf[0] == 0:
        scores = np.zeros(x.size)
        scores[0] = 1.0
    else:
        scores = acf / acf[0]
    return SimilarityProfile(scores=scores, window_size=0, offset=0, source="autocorrelation")


def dynamic_threshold(state: EngineState, scores: SimilarityProfile | np.ndarray) -> float:
    """
    Mean plus one standard deviation of the scores, relaxed to their 90th percentile when fewer than five scores
    exceed it. Without dynamic thresholds this is the 95th percentile.
    """
    scores = np.asarray(scores.scores if isinstance(scores, SimilarityProfile) else scores, dtype=float)
    if scores.size == 0:
        raise ValueError("Dynamic threshold needs at least one score")

    if not state.dynamic_threshold:
        return float(np.percentile(scores, 95))

    base = scores.mean() + scores.std()
    if np.count_nonzero(scores > base) < 5:
        threshold = float(np.percentile(scores, 90))
    else:
        threshold = float(base)
    log.debug(f"Dynamic threshold adjusted: {threshold}")
    return threshold


########################################################
#
#   Prediction
#
########################################################

def _select_candidates(profile: SimilarityProfile, window: int, horizon: int, length: int) -> np.ndarray:
    """ Percentile descent until three candidates with a complete future window are found """
    scores = profile.scores
    valid = np.empty(0, dtype=int)
    for percentile in SELECTION_PERCENTILES:
        top = np.flatnonzero(scores > np.percentile(scores, percentile))
        starts = profile.start_index(top)
        valid = top[(starts >= 0) & (starts + window + horizon <= length)]
        if valid.size >= MIN_CANDIDATES:
            break
    return valid


def _update_performance(state: EngineState, series: TimeSeries, forecast: np.ndarray):
    """ Scores the forecast against the trailing observations of the same length """
    actual = series.values[-forecast.size:]
    error = float(np.mean((actual - forecast) ** 2))
    if forecast.size < 2 or np.ptp(actual) == 0 or np.ptp(forecast) == 0:
        similarity = np.nan
    else:
        similarity = float(np.corrcoef(actual, forecast)[0, 1])
    record_performance(state, error, similarity)


def predict(state: EngineState, series: TimeSeries) -> ForecastResult:
    """
    Similarity-weighted forecast. Candidate segments are chosen by percentile descent (95th down to 75th) over the
    similarity profile; the windows following them are shifted to start at the last observation and averaged with
    their similarity scores as weights. Anything that prevents this routes to L{fallback_predict}.

    @return: A forecast of C{state.forecast_horizon} values
    """
    length = len(series)
    if length < 4:
        raise TooShort(f"Prediction needs at least 4 observations, got {length}")

    adjust_dynamic_parameters(state, series)
    window, horizon = state.window_size, state.forecast_horizon

    result = None
    try:
        profile = find_similar_segments(state, series)
        threshold = dynamic_threshold(state, profile)
        valid = _select_candidates(profile, window, horizon, length)
        weights = profile.scores[valid]

        if valid.size == 0:
            log.info("No valid candidate segments, using fallback prediction")
        elif np.any(weights < 0) or weights.sum() <= 0:
            log.info("Candidate weights are not a convex combination, using fallback prediction")
        else:
            starts = profile.start_index(valid)
            futures = series.values[starts[:, np.newaxis] + window + np.arange(horizon)]
            aligned = futures + (series.last - futures[:, :1])
            values = np.average(aligned, axis=0, weights=weights)
            values[0] = series.last
            log.debug(f"Forecast from {valid.size} candidate segments")
            result = ForecastResult(
                values=values, provenance=Provenance.SIMILARITY, window_size=window, threshold=threshold,
            )
    except (SpinexError, ValueError, ArithmeticError) as e:
        log.warning(f"Error in predict: {e}")

    if result is None:
        result = fallback_predict(state, series, num_points=horizon)

    _update_performance(state, series, result.values)
    return result


########################################################
#
#   Fallback
#
########################################################

def _moving_average(x: np.ndarray, window: int) -> np.ndarray:
    return np.convolve(x, np.ones(window) / window, mode="valid")


def _detrend(x: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray, int]:
    """ Residual against the centered moving average; returns (trend, detrended, offset of detrended[0]) """
    trend = _moving_average(x, window)
    offset = (window - 1) // 2
    return trend, x[offset:offset + trend.size] - trend, offset


def _trend_window(x: np.ndarray) -> int:
    upper = x.size // 2
    lower = min(10, upper)
    if upper < 2:
        return 1
    if lower >= upper:
        return upper

    def mse(window: float) -> float:
        _, detrended, _ = _detrend(x, int(window))
        return float(np.mean(detrended ** 2))

    result = minimize_scalar(mse, bounds=(lower, upper), method="bounded")
    return int(np.clip(int(result.x), lower, upper))


def _seasonal_periods(detrended: np.ndarray, num_points: int, num_seasons: int) -> list[int]:
    """ The C{num_seasons} lags with the highest lagged correlation, each lag picked once """
    n = detrended.size
    max_period = max(4, min(num_points, n // 2))
    lags = np.array([lag for lag in range(1, max_period) if n - lag >= 2], dtype=int)

    correlations = np.full(lags.size, -np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        for i, lag in enumerate(lags):
            head, tail = detrended[:-lag], detrended[lag:]
            if np.ptp(head) > 0 and np.ptp(tail) > 0:
                correlations[i] = np.corrcoef(head, tail)[0, 1]
    correlations[~np.isfinite(correlations)] = -np.inf

    periods = []
    for _ in range(num_seasons):
        if not np.any(np.isfinite(correlations)):
            break
        best = int(np.argmax(correlations))
        periods.append(int(lags[best]))
        correlations[best] = -np.inf
    return periods


def decompose(series: TimeSeries, num_points: int, num_seasons: int = 2) -> FallbackComponents:
    """
    Split the series into a moving-average trend, phase-mean seasonal components and residuals. Residual outliers
    (more than 3 standard deviations from the mean) are replaced by the residual median. A cubic polynomial over the
    whole series models the trend that is extrapolated.

    @param num_points: Caps the seasonal lag search; the series needs at least twice as many observations
    @param num_seasons: Number of seasonal periods to extract, 1 to 4
    """
    x = series.values
    if x.size < 2 * num_points or x.size < 2:
        raise InsufficientData("Insufficient data for prediction")
    if not 1 <= num_seasons <= 4:
        raise ValueError(f"num_seasons must be between 1 and 4, got {num_seasons}")

    window = _trend_window(x)
    trend, detrended, offset = _detrend(x, window)

    periods = _seasonal_periods(detrended, num_points, num_seasons)
    components = [np.array([detrended[i::period].mean() for i in range(period)]) for period in periods]
    combined = np.zeros_like(detrended)
    for component in components:
        combined += np.resize(component, detrended.size)

    residuals = detrended - combined
    anomalies = np.abs(residuals - residuals.mean()) > 3 * residuals.std()
    cleaned = residuals.copy()
    cleaned[anomalies] = np.median(residuals)

    model = Polynomial.fit(np.arange(x.size), x, deg=min(3, x.size - 1))
    return FallbackComponents(
        trend=trend,
        trend_window=window,
        seasonal_periods=periods,
        seasonal_components=components,
        residuals=cleaned,
        anomaly_mask=anomalies,
        trend_polynomial=model.convert().coef,
        trend_model=model,
        trend_offset=offset,
    )


def _simulate_residuals(residuals: np.ndarray, horizon: int, seed: int, confidence: float):
    """ Exponentially weighted residual mean and spread, projected by Monte-Carlo paths """
    weights = np.exp(np.linspace(-1, 0, residuals.size))
    mean = np.sum(residuals * weights) / np.sum(weights)
    std = np.sqrt(np.sum(weights * (residuals - mean) ** 2) / np.sum(weights))

    paths = seeded_rng(seed).normal(mean, std, (MONTE_CARLO_PATHS, horizon))
    lower = np.percentile(paths, (1 - confidence) / 2 * 100, axis=0)
    upper = np.percentile(paths, (1 + confidence) / 2 * 100, axis=0)
    return paths.mean(axis=0), lower, upper


def fallback_predict(
    state: EngineState,
    series: TimeSeries,
    num_points: int | None = None,
    num_seasons: int = 2,
    confidence: float = 0.95,
) -> ForecastResult:
    """
    Decomposition forecast: cubic trend extrapolation plus phase-aligned seasonal components plus the simulated
    residual mean. Bands are the residual simulation percentiles offset by the same trend and seasonal terms.
    """
    horizon = state.forecast_horizon
    num_points = horizon if num_points is None else num_points
    components = decompose(series, num_points, num_seasons)

    length = len(series)
    future_index = np.arange(length, length + horizon)
    deterministic = components.trend_model(future_index)
    for period, component in zip(components.seasonal_periods, components.seasonal_components):
        deterministic = deterministic + component[(future_index - components.trend_offset) % period]

    residual_mean, lower, upper = _simulate_residuals(components.residuals, horizon, state.seed, confidence)
    log.debug(f"Fallback forecast with trend window {components.trend_window} "
              f"and seasonal periods {components.seasonal_periods}")

    return ForecastResult(
        values=deterministic + residual_mean,
        ci_lower=deterministic + lower,
        ci_upper=deterministic + upper,
        provenance=Provenance.FALLBACK,
        window_size=state.window_size,
        threshold=state.threshold,
    )


def tune_hyperparameters(state: EngineState, series: TimeSeries) -> int:
    """ Number of seasonal periods (1 to 4) whose fallback forecast best matches the trailing observations """
    best_num_seasons, best_mse = 1, np.inf
    for num_seasons in range(1, 5):
        predicted = fallback_predict(state, series, num_points=TUNING_POINTS, num_seasons=num_seasons).values
        mse = float(np.mean((series.values[-predicted.size:] - predicted) ** 2))
        if mse < best_mse:
            best_num_seasons, best_mse = num_seasons, mse
    return best_num_seasons
