import logging

import numpy as np

from .errors import TooShort
from .types import *


__all__ = ["extract_segments", "adaptive_window_size", "adjust_dynamic_parameters", "MIN_WINDOW_SIZE"]

log = logging.getLogger(__name__)

MIN_WINDOW_SIZE = 10
NORMALIZATION_EPSILON = 1e-8


def extract_segments(series: TimeSeries, window_size: int) -> SegmentMatrix:
    """
    Cut the series into overlapping stride-1 windows and normalize each one to M{(x - mean) / (std + 1e-8)}.
    Constant windows become all-zero rows.

    @param series: The series to segment
    @param window_size: Requested window; replaced by half the series length when the series is shorter
    @return: One row per window, row C{i} starting at index C{i}
    """
    length = len(series)
    if length < 2:
        raise TooShort("Segment extraction needs at least two observations")
    if window_size < 1:
        raise ValueError(f"Window size must be positive, got {window_size}")

    if length < window_size:
        log.debug(f"Data length ({length}) is less than window size ({window_size}), using {length // 2}")
        window_size = length // 2

    windows = np.lib.stride_tricks.sliding_window_view(series.values, window_size)
    means = windows.mean(axis=1, keepdims=True)
    stds = windows.std(axis=1, keepdims=True)
    rows = (windows - means) / (stds + NORMALIZATION_EPSILON)
    rows[np.ptp(windows, axis=1) == 0] = 0.0

    return SegmentMatrix(rows=rows, source_length=length, window_size=window_size)


def adaptive_window_size(series: TimeSeries) -> int:
    """
    Window size from the series length, its variability and its first seasonal period. The result is clamped to
    [2, len/8], the lower bound winning for very short series.
    """
    from .diagnostics import detect_seasonality

    length = len(series)
    if length < 2:
        raise TooShort("Window sizing needs at least two observations")

    if length < 100:
        base_window = max(2, length // 20)
    elif length < 1000:
        base_window = max(5, length // 40)
    else:
        base_window = max(25, length // 80)

    seasons = detect_seasonality(series) if length >= 4 else []
    variability = np.std(series.values) / (np.mean(series.values) + NORMALIZATION_EPSILON)
    if seasons:
        window = min(max(seasons), base_window)
    else:
        window = int(base_window * (1 + variability)) if np.isfinite(variability) else base_window

    return int(max(2, min(window, length // 8)))


def adjust_dynamic_parameters(state: EngineState, series: TimeSeries) -> EngineState:
    """
    Re-derive the window from the volatility of the trailing baseline window and the threshold from the recent
    performance history. The window only moves when dynamic windows are enabled.

    @return: The same, updated state
    """
    length = len(series)
    if length < 2:
        raise TooShort("Parameter adjustment needs at least two observations")

    max_window = length // 2
    baseline_window = max(MIN_WINDOW_SIZE, length // 10)
    recent = series.values[-baseline_window:] if length > baseline_window else series.values
    scale_factor = float(np.clip(np.std(recent), 0.1, 1.0))

    if state.dynamic_window:
        window = int(max_window / scale_factor)
        state.window_size = max(1, min(max(MIN_WINDOW_SIZE, min(window, max_window)), max_window))

    errors = np.array([e for e in state.recent_errors if np.isfinite(e)])
    threshold_adjustment = errors.mean() + errors.std() if errors.size else 0.0

    similarities = np.array([s for s in state.recent_similarity_scores if np.isfinite(s)])
    if similarities.size:
        state.threshold = float(similarities.mean() + similarities.std() + threshold_adjustment)
    else:
        state.threshold = 0.5

    log.debug(f"Adjusted window size: {state.window_size}, threshold: {state.threshold}")
    return state
