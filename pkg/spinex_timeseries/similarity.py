"""
Similarity kernels between segments. Every kernel exists in two shapes: the full n x n matrix
(L{pairwise_similarity}) and the row of that matrix that compares each historical segment with the latest one
(L{reference_similarity}), which is all the forecaster needs.

Two dynamic time warping variants live here: the absolute-cost distance used for similarity and the
squared-cost-under-root distance used to score forecasts.
"""
import logging
from typing import Callable

import numpy as np
from scipy.spatial.distance import cdist, pdist
from scipy.stats import rankdata

from .errors import EmptyInput, LengthMismatch, TooShort, UnknownMethod
from .types import *


__all__ = [
    "dtw_distance", "squared_dtw_distance", "pairwise_similarity", "reference_similarity",
    "adjusted_dtw_similarity", "sample_entropy", "direction_accuracy",
]

log = logging.getLogger(__name__)


########################################################
#
#   Dynamic time warping
#
########################################################

def _dtw_pairs(a: np.ndarray, b: np.ndarray, cost: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """
    Full-matrix DTW for many pairs at once. Row C{k} of C{a} is aligned with row C{k} of C{b}; the recursion runs over
    the cells while every cell is evaluated for all pairs in one vector operation.

    @param a: (pairs, n) matrix
    @param b: (pairs, m) matrix
    @param cost: Local cost of a difference, applied element-wise
    @return: (pairs,) accumulated costs
    """
    pairs, n = a.shape
    m = b.shape[1]

    # Layout is (column, pair) so that every column update is contiguous
    previous = np.full((m + 1, pairs), np.inf)
    previous[0] = 0.0
    current = np.empty_like(previous)
    for i in range(n):
        local = cost(a[:, i] - b.T)
        current[0] = np.inf
        for j in range(1, m + 1):
            current[j] = local[j - 1] + np.minimum(np.minimum(previous[j], current[j - 1]), previous[j - 1])
        previous, current = current, previous
    return previous[m].copy()


def _as_sequence(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        raise EmptyInput("DTW needs non-empty sequences")
    return x


def dtw_distance(a, b) -> float:
    """ Minimal sum of absolute differences over all monotone alignments of C{a} and C{b} """
    a, b = _as_sequence(a), _as_sequence(b)
    return float(_dtw_pairs(a[None, :], b[None, :], np.abs)[0])


def squared_dtw_distance(a, b) -> float:
    """ Square root of the minimal sum of squared differences over all monotone alignments """
    a, b = _as_sequence(a), _as_sequence(b)
    return float(np.sqrt(_dtw_pairs(a[None, :], b[None, :], np.square)[0]))


########################################################
#
#   Kernels
#
########################################################

def _rows(segments: SegmentMatrix | np.ndarray) -> np.ndarray:
    rows = segments.rows if isinstance(segments, SegmentMatrix) else np.asarray(segments, dtype=float)
    if rows.ndim != 2 or rows.shape[0] < 2:
        raise TooShort("Similarity needs at least two segments")
    if rows.shape[1] < 2:
        raise TooShort("Similarity needs segments of length two or more")
    return rows


def _check_method(method: str):
    if method not in SIMILARITY_METHODS:
        raise UnknownMethod(f"Invalid similarity method: {method!r}")


def _centered(x: np.ndarray) -> np.ndarray:
    return x - x.mean(axis=-1, keepdims=True)


def _ranked(x: np.ndarray) -> np.ndarray:
    return _centered(rankdata(x, axis=-1))


def _transform(x: np.ndarray, method: str) -> np.ndarray:
    """ Correlation is the cosine of centered rows, Spearman the cosine of centered ranks """
    if method == "correlation":
        return _centered(x)
    if method == "spearman":
        return _ranked(x)
    return x


def _degenerate(x: np.ndarray, method: str) -> np.ndarray:
    if method == "cosine":
        return ~np.any(x != 0, axis=-1)
    if method in ("correlation", "spearman"):
        return np.ptp(x, axis=-1) == 0
    return np.zeros(x.shape[:-1], dtype=bool)


def _paired(a: np.ndarray, b: np.ndarray, method: str) -> np.ndarray:
    """ Similarity of row k of C{a} with row k of C{b} """
    if method in ("cosine", "correlation", "spearman"):
        ta, tb = _transform(a, method), _transform(b, method)
        with np.errstate(divide="ignore", invalid="ignore"):
            scores = np.sum(ta * tb, axis=1) / (np.linalg.norm(ta, axis=1) * np.linalg.norm(tb, axis=1))
        scores = np.clip(scores, -1.0, 1.0)
    elif method == "euclidean":
        scores = 1.0 / (1.0 + np.linalg.norm(a - b, axis=1))
    elif method == "dtw":
        scores = 1.0 / (1.0 + _dtw_pairs(a, b, np.abs))
    elif method == "direction":
        scores = np.mean(np.sign(np.diff(a, axis=1)) == np.sign(np.diff(b, axis=1)), axis=1)
    else:
        raise UnknownMethod(f"Invalid similarity method: {method!r}")

    degenerate = _degenerate(a, method) | _degenerate(b, method)
    if np.any(degenerate):
        equal = np.all(a == b, axis=1)
        scores = np.where(degenerate, equal.astype(float), scores)
    return scores


def _substitute_degenerate(entries: np.ndarray, rows: np.ndarray, method: str) -> np.ndarray:
    for i in np.flatnonzero(_degenerate(rows, method)):
        equal = np.all(rows == rows[i], axis=1).astype(float)
        entries[i, :] = equal
        entries[:, i] = equal
    return entries


def pairwise_similarity(segments: SegmentMatrix | np.ndarray, method: str) -> SimilarityMatrix:
    """
    Similarity of every segment with every other segment.

    Degenerate segments (zero norm for cosine, zero variance for correlation and spearman) score 1 against an
    element-wise equal segment and 0 against anything else.

    @param segments: Matrix with one segment per row
    @param method: One of L{SIMILARITY_METHODS}
    @return: The symmetric similarity matrix
    """
    _check_method(method)
    rows = _rows(segments)
    n = rows.shape[0]

    if method in ("cosine", "correlation", "spearman"):
        transformed = _transform(rows, method)
        norms = np.linalg.norm(transformed, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            entries = (transformed @ transformed.T) / np.outer(norms, norms)
        entries = np.clip(entries, -1.0, 1.0)
        np.fill_diagonal(entries, 1.0)
        entries = _substitute_degenerate(entries, rows, method)
    elif method == "euclidean":
        entries = 1.0 / (1.0 + cdist(rows, rows, metric="euclidean"))
    else:
        upper_i, upper_j = np.triu_indices(n, k=1)
        entries = np.ones((n, n))
        scores = _paired(rows[upper_i], rows[upper_j], method)
        entries[upper_i, upper_j] = scores
        entries[upper_j, upper_i] = scores

    entries = (entries + entries.T) / 2.0
    return SimilarityMatrix(entries=entries, method=method)


def reference_similarity(segments: SegmentMatrix | np.ndarray, method: str) -> np.ndarray:
    """
    Similarity of every historical segment with the latest one, i.e. the last row of L{pairwise_similarity} without
    its diagonal entry.
    """
    _check_method(method)
    rows = _rows(segments)
    history = rows[:-1]
    latest = np.broadcast_to(rows[-1], history.shape)
    return _paired(history, latest, method)


def adjusted_dtw_similarity(segments: SegmentMatrix | np.ndarray) -> SimilarityMatrix:
    """ Applies M{1 / (1 + sqrt(s))} to the DTW similarity matrix """
    raw = pairwise_similarity(segments, "dtw").entries
    return SimilarityMatrix(entries=1.0 / (1.0 + np.sqrt(raw)), method="dtw")


########################################################
#
#   Entropy and direction
#
########################################################

def sample_entropy(x, params: EntropyParams = EntropyParams()) -> float:
    """
    Sample entropy with an absolute tolerance. Two templates match when every element-wise difference is at most
    C{r}; each unordered pair is counted once and self-matches are excluded.

    @return: M{-log((A + 1e-10) / (B + 1e-10))}, with B the matches of length m and A those of length m + 1
    """
    m, r = params
    if m < 1 or r <= 0:
        raise ValueError(f"Invalid entropy parameters {params!r}")
    x = np.asarray(x, dtype=float).ravel()
    if x.size <= m + 1:
        raise TooShort(f"Sample entropy with m={m} needs more than {m + 1} values, got {x.size}")

    templates = np.lib.stride_tricks.sliding_window_view(x, m + 1)
    b = np.count_nonzero(pdist(templates[:, :m], metric="chebyshev") <= r)
    a = np.count_nonzero(pdist(templates, metric="chebyshev") <= r)
    return float(-np.log((a + 1e-10) / (b + 1e-10)))


def direction_accuracy(s1, s2) -> float:
    """ Fraction of steps in which both sequences move in the same direction; a flat step only matches a flat step """
    s1 = np.asarray(s1, dtype=float).ravel()
    s2 = np.asarray(s2, dtype=float).ravel()
    if s1.size != s2.size:
        raise LengthMismatch(f"Sequences have different lengths: {s1.size} and {s2.size}")
    if s1.size < 2:
        raise TooShort("Direction accuracy needs at least two values")
    return float(np.mean(np.sign(np.diff(s1)) == np.sign(np.diff(s2))))
