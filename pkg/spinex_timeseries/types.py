import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, NamedTuple, Sequence

import numpy as np
import pandas as pd
from numpy.polynomial import Polynomial

from .errors import EmptyInput, InvalidSeries


__all__ = [
    "SIMILARITY_METHODS", "HISTORY_LENGTH",
    "TimeSeries", "EngineState", "ForecastResult", "Provenance", "Report", "ReportKind",
    "SegmentMatrix", "SimilarityMatrix", "SimilarityProfile", "EntropyParams", "FallbackComponents",
    "AnomalyRecord", "SegmentContribution", "ExplainabilityReport", "SegmentAnalysis", "NeighborAnalysis",
    "EvaluationPair", "MetricRecord", "CrossValidationResult",
    "BaselineSpec", "SyntheticSpec", "BenchmarkRecord", "RankingScheme", "RankingTable", "ComplexityFit",
]


SIMILARITY_METHODS = ("cosine", "correlation", "euclidean", "spearman", "dtw", "direction")
HISTORY_LENGTH = 100


def _floats(values) -> list[float | None]:
    """ JSON friendly list, NaN becomes None """
    return [None if not math.isfinite(v) else float(v) for v in np.asarray(values, dtype=float).ravel()]


def _float(value) -> float | None:
    value = float(value)
    return value if math.isfinite(value) else None


def _frozen(values, dtype=float) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


########################################################
#
#   Series and engine
#
########################################################

@dataclass(frozen=True, eq=False)
class TimeSeries:
    values: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        values = _frozen(np.ravel(self.values))
        if values.size == 0:
            raise EmptyInput("A time series needs at least one observation")
        if not np.all(np.isfinite(values)):
            raise InvalidSeries("Time series values must be finite")
        object.__setattr__(self, "values", values)

        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != values.size:
                raise InvalidSeries(f"Got {len(labels)} labels for {values.size} values")
            if any(b <= a for a, b in zip(labels, labels[1:])):
                raise InvalidSeries("Labels must be strictly increasing")
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, item: slice) -> "TimeSeries":
        labels = self.labels[item] if self.labels is not None else None
        return TimeSeries(self.values[item], labels)

    @property
    def last(self) -> float:
        return float(self.values[-1])


@dataclass(kw_only=True)
class EngineState:
    window_size: int
    forecast_horizon: int
    similarity_methods: tuple[str, ...] = ("cosine", "euclidean", "dtw")
    dynamic_window: bool = True
    multi_level: bool = True
    dynamic_threshold: bool = True
    threshold: float = 0.5
    seed: int = 0

    recent_errors: deque = field(default_factory=lambda: deque(maxlen=HISTORY_LENGTH))
    recent_similarity_scores: deque = field(default_factory=lambda: deque(maxlen=HISTORY_LENGTH))
    segment_cache: dict = field(default_factory=dict)
    similarity_cache: dict = field(default_factory=dict)

    def clear_caches(self):
        self.segment_cache.clear()
        self.similarity_cache.clear()

    def dump(self) -> dict:
        return {
            "window_size": self.window_size,
            "forecast_horizon": self.forecast_horizon,
            "similarity_methods": list(self.similarity_methods),
            "dynamic_window": self.dynamic_window,
            "multi_level": self.multi_level,
            "dynamic_threshold": self.dynamic_threshold,
            "threshold": _float(self.threshold),
        }


class Provenance(str, Enum):
    SIMILARITY = "similarity"
    FALLBACK = "fallback"
    BASELINE = "baseline"


@dataclass(frozen=True, kw_only=True, eq=False)
class ForecastResult:
    values: np.ndarray
    provenance: Provenance
    ci_lower: np.ndarray | None = None
    ci_upper: np.ndarray | None = None
    window_size: int | None = None
    threshold: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        for name in ("ci_lower", "ci_upper"):
            if getattr(self, name) is not None:
                object.__setattr__(self, name, _frozen(getattr(self, name)))

    def __len__(self) -> int:
        return self.values.size

    @property
    def has_bands(self) -> bool:
        return self.ci_lower is not None and self.ci_upper is not None

    def dump(self) -> dict:
        return {
            "values": _floats(self.values),
            "ci_lower": _floats(self.ci_lower) if self.ci_lower is not None else None,
            "ci_upper": _floats(self.ci_upper) if self.ci_upper is not None else None,
            "provenance": self.provenance.value,
            "window_size": self.window_size,
            "threshold": _float(self.threshold) if self.threshold is not None else None,
        }


class ReportKind(str, Enum):
    FORECAST = "forecast"
    ANOMALIES = "anomalies"
    EXPLAINABILITY = "explainability"
    METRICS = "metrics"
    BENCHMARK = "benchmark"
    COMPLEXITY = "complexity"


@dataclass(frozen=True, kw_only=True)
class Report:
    kind: ReportKind
    payload: dict
    seed: int = 0
    generated_by: str = "spinex_timeseries"

    def dump(self) -> dict:
        return {
            "kind": self.kind.value,
            "generated_by": self.generated_by,
            "seed": self.seed,
            "payload": self.payload,
        }

    @classmethod
    def load(cls, document: dict) -> "Report":
        return cls(
            kind=ReportKind(document["kind"]),
            generated_by=document["generated_by"],
            seed=int(document["seed"]),
            payload=document["payload"],
        )


########################################################
#
#   Segments and similarity
#
########################################################

@dataclass(frozen=True, kw_only=True, eq=False)
class SegmentMatrix:
    rows: np.ndarray
    source_length: int
    window_size: int

    def __len__(self) -> int:
        return self.rows.shape[0]

    @property
    def n_segments(self) -> int:
        return self.rows.shape[0]

    @property
    def latest(self) -> np.ndarray:
        return self.rows[-1]


@dataclass(frozen=True, kw_only=True, eq=False)
class SimilarityMatrix:
    entries: np.ndarray
    method: str


@dataclass(frozen=True, kw_only=True, eq=False)
class SimilarityProfile:
    """
    Similarity of every historical segment to the latest one. Scores are ordered by segment position; C{offset} maps a
    score index to the start index of the primary-window segment it belongs to.
    """
    scores: np.ndarray
    window_size: int
    offset: int = 0
    source: str = "segments"

    def __len__(self) -> int:
        return self.scores.size

    def start_index(self, index: int | np.ndarray) -> int | np.ndarray:
        return index + self.offset


class EntropyParams(NamedTuple):
    m: int = 2
    r: float = 0.2


@dataclass(kw_only=True, eq=False)
class FallbackComponents:
    trend: np.ndarray
    trend_window: int
    seasonal_periods: list[int]
    seasonal_components: list[np.ndarray]
    residuals: np.ndarray
    anomaly_mask: np.ndarray
    trend_polynomial: np.ndarray
    trend_model: Polynomial
    trend_offset: int = 0

    def dump(self) -> dict:
        return {
            "trend_window": self.trend_window,
            "seasonal_periods": list(self.seasonal_periods),
            "seasonal_components": [_floats(s) for s in self.seasonal_components],
            "residual_anomalies": int(np.count_nonzero(self.anomaly_mask)),
            "trend_polynomial": _floats(self.trend_polynomial),
        }


########################################################
#
#   Diagnostics
#
########################################################

@dataclass(frozen=True, kw_only=True)
class AnomalyRecord:
    start_index: int
    end_index: int
    segment: tuple[float, ...]
    similarity_score: float

    def dump(self) -> dict:
        return {"start": self.start_index, "end": self.end_index, "score": _float(self.similarity_score)}


@dataclass(frozen=True, kw_only=True)
class SegmentContribution:
    segment_index: int
    similarity_score: float
    prediction: list[float]
    weighted_contribution: list[float]
    contribution_percentage: list[float]

    def dump(self) -> dict:
        return {
            "segment_index": self.segment_index,
            "similarity_score": _float(self.similarity_score),
            "prediction": _floats(self.prediction),
            "weighted_contribution": _floats(self.weighted_contribution),
            "contribution_percentage": _floats(self.contribution_percentage),
        }


@dataclass(frozen=True, kw_only=True)
class ExplainabilityReport:
    top_similar_segments: list[int]
    similarity_scores: list[float]
    threshold: float
    segment_contributions: list[SegmentContribution]
    combined_prediction: list[float]

    def dump(self) -> dict:
        return {
            "top_similar_segments": list(self.top_similar_segments),
            "similarity_scores": _floats(self.similarity_scores),
            "threshold": _float(self.threshold),
            "segment_contributions": [c.dump() for c in self.segment_contributions],
            "combined_prediction": _floats(self.combined_prediction),
        }


@dataclass(frozen=True, kw_only=True)
class SegmentAnalysis:
    segment_index: int
    similarity_scores: dict[str, float]
    feature_contributions: list[float]
    top_contributing_features: list[int]

    def dump(self) -> dict:
        return {
            "segment_index": self.segment_index,
            "similarity_scores": {method: _float(score) for method, score in self.similarity_scores.items()},
            "feature_contributions": _floats(self.feature_contributions),
            "top_contributing_features": list(self.top_contributing_features),
        }


@dataclass(frozen=True, kw_only=True)
class NeighborAnalysis:
    current_segment: list[float]
    neighbors: list[tuple[int, float]]
    analyses: list[SegmentAnalysis]

    def dump(self) -> dict:
        return {
            "current_segment": _floats(self.current_segment),
            "neighbors": [
                {"rank": rank, "start_index": index, "overall_similarity": _float(score), **analysis.dump()}
                for rank, ((index, score), analysis) in enumerate(zip(self.neighbors, self.analyses), start=1)
            ],
        }

    def to_frame(self, segments: np.ndarray) -> pd.DataFrame:
        """
        Plot-ready table with one column per neighbor segment next to the current segment.

        @param segments: The normalized segments the neighbor indices refer to
        """
        frame = pd.DataFrame({"current": self.current_segment})
        for rank, (index, _) in enumerate(self.neighbors, start=1):
            frame[f"neighbor_{rank}"] = segments[index]
        frame.index.name = "position"
        return frame


########################################################
#
#   Evaluation
#
########################################################

@dataclass(frozen=True, kw_only=True, eq=False)
class EvaluationPair:
    actual: np.ndarray
    predicted: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "actual", _frozen(np.ravel(self.actual)))
        object.__setattr__(self, "predicted", _frozen(np.ravel(self.predicted)))


@dataclass(frozen=True, kw_only=True)
class MetricRecord:
    mse: float
    mae: float
    rmse: float
    mape: float
    smape: float
    r_squared: float
    direction_accuracy: float
    theils_u: float
    mase: float
    dtw_cost: float
    mad: float

    @classmethod
    def fields(cls) -> tuple[str, ...]:
        return tuple(cls.__dataclass_fields__)

    def dump(self) -> dict:
        return {name: _float(getattr(self, name)) for name in self.fields()}


@dataclass(frozen=True, kw_only=True)
class CrossValidationResult:
    metrics: MetricRecord
    completed_splits: int
    # (train_end, test_start, test_end), test_end exclusive
    boundaries: list[tuple[int, int, int]]
    single_split: bool = False

    def dump(self) -> dict:
        return {
            **self.metrics.dump(),
            "completed_splits": self.completed_splits,
            "single_split": self.single_split,
            "boundaries": [list(b) for b in self.boundaries],
        }


########################################################
#
#   Benchmark
#
########################################################

@dataclass(frozen=True, kw_only=True)
class BaselineSpec:
    kind: str
    parameters: dict[str, Any] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.kind

    def dump(self) -> dict:
        return {"kind": self.kind, "parameters": dict(self.parameters)}


@dataclass(frozen=True, kw_only=True)
class SyntheticSpec:
    function_id: str
    n_points: int = 200
    t_max: float = 10.0
    noise_sigma: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n_points < 2:
            raise InvalidSeries(f"n_points must be at least 2, got {self.n_points}")
        if not self.t_max > 0:
            raise InvalidSeries(f"t_max must be positive, got {self.t_max}")
        if self.noise_sigma is not None and self.noise_sigma < 0:
            raise InvalidSeries(f"noise_sigma must be non-negative, got {self.noise_sigma}")

    @property
    def name(self) -> str:
        return f"{self.function_id}-t{self.t_max:g}-n{self.n_points}"


@dataclass(frozen=True, kw_only=True)
class BenchmarkRecord:
    algorithm: str
    dataset: str
    direction_accuracy: float
    dtw_cost: float
    mase: float
    mad: float
    error: str | None = None

    METRICS = ("direction_accuracy", "dtw_cost", "mase", "mad")

    def dump(self) -> dict:
        document = {"algorithm": self.algorithm, "dataset": self.dataset}
        document.update({metric: _float(getattr(self, metric)) for metric in self.METRICS})
        if self.error is not None:
            document["error"] = self.error
        return document


class RankingScheme(str, Enum):
    AVERAGE = "average"
    NORMALIZED = "normalized"
    WINS = "wins"


@dataclass(frozen=True, kw_only=True, eq=False)
class RankingTable:
    """
    One row per algorithm: the cross-dataset metric means, the per-metric ranks (or normalized scores), the
    average and the final rank. Rows are ordered by final rank, then by algorithm name.
    """
    scheme: RankingScheme
    table: pd.DataFrame
    granularity: str = "dataset"

    @property
    def final_rank(self) -> pd.Series:
        return self.table["final_rank"]

    def dump(self) -> dict:
        rows = []
        for algorithm, row in self.table.iterrows():
            entry = {"algorithm": algorithm}
            for column, value in row.items():
                entry[column] = int(value) if column == "final_rank" else _float(value)
            rows.append(entry)
        return {"scheme": self.scheme.value, "granularity": self.granularity, "rows": rows}


@dataclass(frozen=True, kw_only=True)
class ComplexityFit:
    model: str
    parameters: dict[str, float]
    r2: float
    sizes: Sequence[int] = ()
    times: Sequence[float] = ()

    @property
    def exponent_or_rate(self) -> float:
        return {
            "poly": self.parameters.get("exponent"),
            "log": self.parameters.get("slope"),
            "exp": self.parameters.get("rate"),
        }[self.model]

    @property
    def big_o(self) -> str:
        if self.model == "poly":
            return f"O(n^{self.parameters['exponent']:.2f})"
        if self.model == "log":
            return "O(log n)"
        return "O(e^n)"

    def dump(self) -> dict:
        return {
            "sizes": [int(s) for s in self.sizes],
            "times": _floats(self.times),
            "class": self.model,
            "exponent_or_rate": _float(self.exponent_or_rate),
            "parameters": {key: _float(value) for key, value in self.parameters.items()},
            "r2": _float(self.r2),
            "big_o": self.big_o,
        }
