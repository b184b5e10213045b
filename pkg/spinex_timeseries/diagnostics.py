import logging

import numpy as np

from .errors import IndexOutOfRange, NoValidCandidates, TooShort
from .forecaster import dynamic_threshold, find_similar_segments, segments_for
from .similarity import reference_similarity
from .types import *


__all__ = [
    "detect_seasonality", "detect_anomalies", "score_stats", "rank_scores", "nearest_neighbors",
    "top_contributions", "analyze_segment_similarity", "neighbor_analysis", "weighted_contributions",
    "explainability_report",
]

log = logging.getLogger(__name__)


def detect_seasonality(series: TimeSeries, max_lag: int | None = None) -> list[int]:
    """
    First peak of the autocorrelation of the mean-centered series.

    @param max_lag: Largest lag to inspect, defaults to half the series
    @return: C{[period]} or an empty list when the autocorrelation has no interior peak
    """
    length = len(series)
    if length < 4:
        raise TooShort(f"Seasonality detection needs at least 4 observations, got {length}")

    centered = series.values - series.values.mean()
    if np.ptp(series.values) == 0:
        return []

    max_lag = length // 2 if max_lag is None else min(max_lag, length - 1)
    acf = np.correlate(centered, centered, mode="full")[length - 1:length + max_lag]
    peaks = np.flatnonzero((acf[1:-1] > acf[:-2]) & (acf[1:-1] > acf[2:])) + 1
    return [int(peaks[0])] if peaks.size else []


########################################################
#
#   Anomalies and neighbors
#
########################################################

def detect_anomalies(
    state: EngineState, series: TimeSeries, threshold_percentile: float = 2
) -> tuple[list[AnomalyRecord], float]:
    """
    Flag the segments whose similarity to the latest segment lies strictly below the given percentile of all
    similarity scores.

    @return: The flagged segments ordered by start index, and the threshold that flagged them
    """
    profile = find_similar_segments(state, series)
    threshold = float(np.percentile(profile.scores, threshold_percentile))
    window = state.window_size

    anomalies = []
    for index in np.flatnonzero(profile.scores < threshold):
        start = int(profile.start_index(index))
        anomalies.append(AnomalyRecord(
            start_index=start,
            end_index=start + window,
            segment=tuple(series.values[max(start, 0):start + window].tolist()),
            similarity_score=float(profile.scores[index]),
        ))

    log.info(f"Detected {len(anomalies)} anomalies below threshold {threshold:.4f}")
    return anomalies, threshold


def score_stats(scores: SimilarityProfile | np.ndarray) -> dict[str, float]:
    scores = scores.scores if isinstance(scores, SimilarityProfile) else np.asarray(scores, dtype=float)
    return {
        "min": float(scores.min()),
        "max": float(scores.max()),
        "mean": float(scores.mean()),
        "median": float(np.median(scores)),
    }


def rank_scores(scores, k: int) -> np.ndarray:
    """ Positions of the C{k} largest scores, descending, ties broken by the smaller position """
    scores = np.asarray(scores, dtype=float)
    order = np.lexsort((np.arange(scores.size), -scores))
    return order[:k]


def nearest_neighbors(state: EngineState, series: TimeSeries, k: int = 5) -> list[tuple[int, float]]:
    """ The k historical segments most similar to the latest one as (start index, score), descending by score """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    profile = find_similar_segments(state, series)
    return [
        (int(profile.start_index(index)), float(profile.scores[index]))
        for index in rank_scores(profile.scores, k)
    ]


def top_contributions(contributions, k: int = 5) -> list[int]:
    return rank_scores(contributions, k).tolist()


def analyze_segment_similarity(state: EngineState, series: TimeSeries, segment_index: int) -> SegmentAnalysis:
    """
    Compare one historical segment with the latest segment: one score per configured method and the element-wise
    absolute differences, with the five positions that differ most.

    @param segment_index: Start index of the segment at the state's window size
    """
    segments = segments_for(state, series, state.window_size)
    if not 0 <= segment_index < len(segments):
        raise IndexOutOfRange(f"Segment index {segment_index} outside [0, {len(segments) - 1}]")

    current = segments.latest
    historical = segments.rows[segment_index]
    pair = np.vstack([historical, current])
    scores = {method: float(reference_similarity(pair, method)[0]) for method in state.similarity_methods}

    contributions = np.abs(current - historical)
    return SegmentAnalysis(
        segment_index=int(segment_index),
        similarity_scores=scores,
        feature_contributions=contributions.tolist(),
        top_contributing_features=top_contributions(contributions, 5),
    )


def neighbor_analysis(state: EngineState, series: TimeSeries, k: int = 5) -> NeighborAnalysis:
    segments = segments_for(state, series, state.window_size)
    neighbors = [
        (index, score) for index, score in nearest_neighbors(state, series, k)
        if 0 <= index < len(segments)
    ]
    return NeighborAnalysis(
        current_segment=segments.latest.tolist(),
        neighbors=neighbors,
        analyses=[analyze_segment_similarity(state, series, index) for index, _ in neighbors],
    )


########################################################
#
#   Explainability
#
########################################################

def weighted_contributions(
    indices, scores, futures: np.ndarray
) -> tuple[list[SegmentContribution], np.ndarray]:
    """
    Split a similarity-weighted forecast into per-segment contributions. Percentages are normalized per forecast
    step; a step whose weighted values sum to zero is shared equally.

    @param indices: Segment start indices
    @param scores: Similarity score of each segment, used as weight
    @param futures: (segments, horizon) values following each segment
    @return: The contributions and the combined weighted forecast
    """
    scores = np.asarray(scores, dtype=float)
    futures = np.atleast_2d(np.asarray(futures, dtype=float))
    weighted = futures * scores[:, np.newaxis]
    totals = weighted.sum(axis=0)

    with np.errstate(divide="ignore", invalid="ignore"):
        percentages = np.where(totals != 0, weighted / totals * 100, 100 / len(scores))
    weight_sum = scores.sum()
    combined = totals / weight_sum if weight_sum != 0 else futures.mean(axis=0)

    contributions = [
        SegmentContribution(
            segment_index=int(index),
            similarity_score=float(score),
            prediction=future.tolist(),
            weighted_contribution=contribution.tolist(),
            contribution_percentage=percentage.tolist(),
        )
        for index, score, future, contribution, percentage in zip(indices, scores, futures, weighted, percentages)
    ]
    return contributions, combined


def explainability_report(state: EngineState, series: TimeSeries, top_k: int = 5) -> ExplainabilityReport:
    """
    Explain a forecast by the segments above the dynamic threshold (or the C{top_k} best ones when none exceed it)
    and how much each of them contributes to every forecast step.
    """
    profile = find_similar_segments(state, series)
    threshold = dynamic_threshold(state, profile)

    selected = np.flatnonzero(profile.scores > threshold)
    if selected.size == 0:
        selected = rank_scores(profile.scores, top_k)

    window, horizon, length = state.window_size, state.forecast_horizon, len(series)
    starts = profile.start_index(selected)
    valid = (starts >= 0) & (starts + window + horizon <= length)
    if not np.any(valid):
        raise NoValidCandidates("No similar segment is followed by a complete forecast window")

    valid_starts = starts[valid]
    futures = series.values[valid_starts[:, np.newaxis] + window + np.arange(horizon)]
    contributions, combined = weighted_contributions(valid_starts, profile.scores[selected[valid]], futures)

    return ExplainabilityReport(
        top_similar_segments=[int(s) for s in starts],
        similarity_scores=profile.scores[selected].tolist(),
        threshold=threshold,
        segment_contributions=contributions,
        combined_prediction=combined.tolist(),
    )
