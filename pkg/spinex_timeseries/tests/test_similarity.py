from functools import lru_cache
from itertools import combinations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from spinex_timeseries.errors import EmptyInput, LengthMismatch, TooShort, UnknownMethod
from spinex_timeseries.similarity import (
    adjusted_dtw_similarity, direction_accuracy, dtw_distance, pairwise_similarity, reference_similarity,
    sample_entropy, squared_dtw_distance,
)
from spinex_timeseries.types import SIMILARITY_METHODS, EntropyParams


def dtw_oracle(a, b, cost=abs):
    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0 and j == 0:
            return cost(a[0] - b[0])
        candidates = []
        if i > 0:
            candidates.append(d(i - 1, j))
        if j > 0:
            candidates.append(d(i, j - 1))
        if i > 0 and j > 0:
            candidates.append(d(i - 1, j - 1))
        return cost(a[i] - b[j]) + min(candidates)

    return d(len(a) - 1, len(b) - 1)


def random_sequences(count, max_length, seed):
    rng = np.random.default_rng(seed)
    return [tuple(rng.integers(-5, 6, size=rng.integers(1, max_length + 1)).astype(float)) for _ in range(count)]


########################################################
#
#   DTW
#
########################################################

@pytest.mark.parametrize("a, b, expected", [
    ([1, 2, 3], [1, 2, 3], 0.0),
    ([0], [5], 5.0),
    ([1, 2, 3], [1, 2, 2, 3], 0.0),
])
def test_dtw_examples(a, b, expected):
    assert dtw_distance(a, b) == expected


def test_dtw_matches_recursive_oracle():
    sequences = random_sequences(200, 6, seed=0)
    for a, b in combinations(sequences, 2):
        assert dtw_distance(a, b) == dtw_oracle(a, b)


def test_squared_dtw_matches_oracle():
    sequences = random_sequences(60, 5, seed=1)
    for a, b in combinations(sequences, 2):
        expected = np.sqrt(dtw_oracle(a, b, cost=lambda x: x * x))
        assert squared_dtw_distance(a, b) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_dtw_properties():
    for a, b in combinations(random_sequences(30, 8, seed=2), 2):
        assert dtw_distance(a, b) == dtw_distance(b, a)
        assert dtw_distance(a, a) == 0
        assert dtw_distance(a, b) >= 0


def test_dtw_empty_input():
    with pytest.raises(EmptyInput):
        dtw_distance([], [1.0])


########################################################
#
#   Matrices
#
########################################################

@pytest.mark.parametrize("method", SIMILARITY_METHODS)
def test_matrix_invariants(method):
    rng = np.random.default_rng(3)
    for _ in range(50):
        segments = rng.normal(size=(rng.integers(2, 8), rng.integers(3, 8)))
        entries = pairwise_similarity(segments, method).entries
        assert_allclose(entries, entries.T, atol=1e-9)
        assert_allclose(np.diag(entries), 1.0, atol=1e-9)
        if method in ("euclidean", "dtw"):
            assert np.all((entries > 0) & (entries <= 1))
        if method == "direction":
            assert np.all((entries >= 0) & (entries <= 1))


@pytest.mark.parametrize("method", SIMILARITY_METHODS)
def test_identical_segments_are_fully_similar(method):
    segment = np.array([0.5, -1.0, 2.0, 0.3])
    entries = pairwise_similarity(np.vstack([segment, segment]), method).entries
    assert entries[0, 1] == pytest.approx(1.0, abs=1e-9)


def test_euclidean_entry():
    entries = pairwise_similarity(np.array([[0.0, 0.0], [3.0, 0.0]]), "euclidean").entries
    assert entries[0, 1] == pytest.approx(0.25)


def test_euclidean_decreases_with_distance():
    rng = np.random.default_rng(4)
    segments = rng.normal(size=(12, 5))
    entries = pairwise_similarity(segments, "euclidean").entries
    distances = np.linalg.norm(segments[:, None] - segments[None], axis=-1)
    upper = np.triu_indices(12, k=1)
    order = np.argsort(distances[upper])
    assert np.all(np.diff(entries[upper][order]) < 0)


def test_spearman_on_monotone_segments():
    entries = pairwise_similarity(np.array([[1.0, 2, 3, 4], [1.0, 4, 9, 16]]), "spearman").entries
    assert entries[0, 1] == pytest.approx(1.0)


@pytest.mark.parametrize("method", ["cosine", "correlation", "spearman"])
def test_degenerate_segments(method):
    segments = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 2.0, 4.0]])
    if method != "cosine":
        segments[:2] = 3.0
    entries = pairwise_similarity(segments, method).entries
    assert np.all(np.isfinite(entries))
    assert entries[0, 1] == 1.0
    assert entries[0, 2] == 0.0


@pytest.mark.parametrize("method", SIMILARITY_METHODS)
def test_reference_row_matches_matrix(method):
    segments = np.random.default_rng(5).normal(size=(9, 6))
    row = pairwise_similarity(segments, method).entries[-1, :-1]
    assert_allclose(reference_similarity(segments, method), row, atol=1e-12)


def test_matrix_errors():
    with pytest.raises(TooShort):
        pairwise_similarity(np.ones((1, 4)), "cosine")
    with pytest.raises(TooShort):
        pairwise_similarity(np.ones((4, 1)), "cosine")
    with pytest.raises(UnknownMethod):
        pairwise_similarity(np.eye(3), "manhattan")


def test_adjusted_dtw():
    identical = np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]])
    assert adjusted_dtw_similarity(identical).entries[0, 1] == pytest.approx(0.5)

    # raw distance 3 gives a raw similarity of 0.25
    segments = np.array([[0.0, 0.0], [1.5, 1.5]])
    assert adjusted_dtw_similarity(segments).entries[0, 1] == pytest.approx(2 / 3)

    entries = adjusted_dtw_similarity(np.random.default_rng(6).normal(size=(6, 4))).entries
    assert_allclose(entries, entries.T, atol=1e-12)


########################################################
#
#   Entropy and direction
#
########################################################

def entropy_oracle(x, m, r):
    def matches(length):
        templates = [x[i:i + length] for i in range(len(x) - m)]
        return sum(
            max(abs(p - q) for p, q in zip(templates[i], templates[j])) <= r
            for i in range(len(templates)) for j in range(i + 1, len(templates))
        )

    a, b = matches(m + 1), matches(m)
    return -np.log((a + 1e-10) / (b + 1e-10))


def test_entropy_of_ramp_is_zero():
    assert sample_entropy(np.arange(20.0)) == pytest.approx(0.0)


@pytest.mark.parametrize("x", [
    np.full(10, 3.0),
    np.sin(np.arange(30) / 3),
    np.random.default_rng(7).normal(size=40) * 0.3,
])
def test_entropy_matches_pair_count(x):
    assert sample_entropy(x, EntropyParams(2, 0.2)) == pytest.approx(entropy_oracle(list(x), 2, 0.2))


def test_entropy_orders_regularity():
    t = np.arange(200)
    sine = np.sin(2 * np.pi * t / 20)
    noise = np.random.default_rng(8).normal(size=200)
    assert sample_entropy(sine) < sample_entropy(noise)


def test_entropy_too_short():
    with pytest.raises(TooShort):
        sample_entropy([1.0, 2.0, 3.0])


def test_direction_accuracy():
    s = np.array([1.0, 2.0, 4.0, 7.0])
    assert direction_accuracy(s, s) == 1.0
    assert direction_accuracy(s, -s) == 0.0
    assert direction_accuracy([1, 2, 1, 2], [1, 2, 3, 2]) == pytest.approx(1 / 3)
    assert direction_accuracy([1, 1, 2], [5, 5, 6]) == 1.0
    assert direction_accuracy(s + 10, s * 2 + 10) == direction_accuracy(s, s)

    with pytest.raises(LengthMismatch):
        direction_accuracy([1, 2], [1, 2, 3])
    with pytest.raises(TooShort):
        direction_accuracy([1], [1])
