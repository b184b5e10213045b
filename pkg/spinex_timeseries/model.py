import logging
from pathlib import Path
from typing import IO

import numpy as np
import pandas as pd

from . import diagnostics, forecaster, metrics
from .bench import BaselineForecaster, Forecaster, SpinexForecaster
from .configurations import Configuration, load_configuration
from .errors import ConfigurationError, IoError, LengthMismatch
from .types import *


class Model:
    """
    Model/Controller that owns one series together with the engine state built for it. Every engine operation goes
    through the Model, so a state is never shared between two owners. The defaults come from a "Configuration", which
    is selected at runtime using the "SPINEX_CONFIGURATION" environment variable; keyword overrides win over it.

    @see: spinex_timeseries.configurations.Configuration
    """

    _configuration: Configuration
    _series: TimeSeries
    _state: EngineState

    def __init__(
        self,
        series: TimeSeries,
        configuration: Configuration | None = None,
        logger: logging.Logger | None = None,
        seed: int = 0,
        **overrides,
    ):
        self._logger = logger or logging.getLogger(__name__)
        self._configuration = configuration or load_configuration(logger=self._logger)
        self._series = series
        self._seed = seed

        options = self._configuration.engine.state_options()
        options["forecast_horizon"] = self._configuration.engine.forecast_horizon
        unknown = set(overrides) - set(options)
        if unknown:
            raise ConfigurationError(f"Unknown engine options: {', '.join(sorted(unknown))}")
        options.update({key: value for key, value in overrides.items() if value is not None})

        self._state = forecaster.init_state(series, seed=seed, **options)
        self._log.debug(f"Engine state {self._state.dump()!r}")

    @property
    def _log(self) -> logging.Logger:
        return self._logger

    @property
    def configuration(self) -> Configuration:
        return self._configuration

    @property
    def series(self) -> TimeSeries:
        return self._series

    @property
    def state(self) -> EngineState:
        return self._state

    def _report(self, kind: ReportKind, payload: dict) -> Report:
        return Report(kind=kind, payload=payload, seed=self._seed)

    ########################################################
    #
    #   Forecasting
    #
    ########################################################

    def predict(self) -> ForecastResult:
        result = forecaster.predict(self._state, self._series)
        self._log.info(f"Forecast of {len(result)} steps via {result.provenance.value!r}")
        return result

    def fallback_predict(self, num_points: int | None = None, num_seasons: int | None = None) -> ForecastResult:
        if num_seasons is None:
            num_seasons = forecaster.tune_hyperparameters(self._state, self._series)
            self._log.info(f"Tuned number of seasons: {num_seasons}")
        return forecaster.fallback_predict(self._state, self._series, num_points=num_points, num_seasons=num_seasons)

    def similar_segments(self) -> SimilarityProfile:
        return forecaster.find_similar_segments(self._state, self._series)

    def forecast_report(self, result: ForecastResult | None = None) -> Report:
        return self._report(ReportKind.FORECAST, (result if result is not None else self.predict()).dump())

    def plot_frame(self, result: ForecastResult) -> pd.DataFrame:
        """
        Plot-ready table pairing the last C{len(result)} observations with the forecast.

        @return: Columns index, actual, predicted and, when available, ci_lower and ci_upper
        """
        values = self._series.values
        columns = {"actual": values, "predicted": np.full(values.size, np.nan)}
        paired = min(len(result), values.size)
        columns["predicted"][-paired:] = result.values[:paired]
        if result.has_bands:
            for name in ("ci_lower", "ci_upper"):
                column = np.full(values.size, np.nan)
                column[-paired:] = getattr(result, name)[:paired]
                columns[name] = column
        frame = pd.DataFrame(columns)
        frame.index.name = "index"
        return frame

    ########################################################
    #
    #   Diagnostics
    #
    ########################################################

    def seasonality(self) -> list[int]:
        return diagnostics.detect_seasonality(self._series)

    def anomalies(self, percentile: float | None = None) -> tuple[list[AnomalyRecord], float]:
        percentile = self._configuration.engine.percentile if percentile is None else percentile
        return diagnostics.detect_anomalies(self._state, self._series, percentile)

    def anomalies_report(self, percentile: float | None = None) -> Report:
        percentile = self._configuration.engine.percentile if percentile is None else percentile
        anomalies, threshold = self.anomalies(percentile)
        payload = {
            "threshold": threshold,
            "percentile": percentile,
            "anomalies": [anomaly.dump() for anomaly in anomalies],
            "score_stats": diagnostics.score_stats(self.similar_segments()),
        }
        return self._report(ReportKind.ANOMALIES, payload)

    def nearest_neighbors(self, k: int | None = None) -> list[tuple[int, float]]:
        return diagnostics.nearest_neighbors(self._state, self._series, k or self._configuration.engine.k)

    def analyze_segment(self, segment_index: int) -> SegmentAnalysis:
        return diagnostics.analyze_segment_similarity(self._state, self._series, segment_index)

    def neighbor_analysis(self, k: int | None = None) -> NeighborAnalysis:
        return diagnostics.neighbor_analysis(self._state, self._series, k or self._configuration.engine.k)

    def neighbor_frame(self, analysis: NeighborAnalysis) -> pd.DataFrame:
        segments = forecaster.segments_for(self._state, self._series, self._state.window_size)
        return analysis.to_frame(segments.rows)

    def explain(self, k: int | None = None) -> ExplainabilityReport:
        return diagnostics.explainability_report(self._state, self._series, k or self._configuration.engine.k)

    def explain_report(self, k: int | None = None, with_neighbors: bool = False) -> Report:
        payload = self.explain(k).dump()
        if with_neighbors:
            payload["neighbor_analysis"] = self.neighbor_analysis(k).dump()
        return self._report(ReportKind.EXPLAINABILITY, payload)

    ########################################################
    #
    #   Evaluation
    #
    ########################################################

    def cross_validate(self, splits: int | None = None) -> CrossValidationResult:
        return metrics.cross_validate(self._state, self._series, splits or self._configuration.engine.splits)

    def evaluate(self, predicted: TimeSeries) -> MetricRecord:
        """ Score C{predicted} against the last observations of the series """
        if len(predicted) > len(self._series):
            raise LengthMismatch(f"Got {len(predicted)} predictions for a series of {len(self._series)} observations")
        actual = self._series.values[-len(predicted):]
        return metrics.evaluate(EvaluationPair(actual=actual, predicted=predicted.values))

    def metrics_report(self, predicted: TimeSeries | None = None, splits: int | None = None) -> Report:
        if predicted is not None:
            payload = self.evaluate(predicted).dump()
        else:
            payload = self.cross_validate(splits).dump()
        return self._report(ReportKind.METRICS, payload)


def build_forecasters(
    configuration: Configuration, algorithms=None, engine_overrides: dict | None = None
) -> list[Forecaster]:
    """
    The benchmark algorithms of a configuration by name: "spinex" for the similarity engine, any baseline kind for a
    reference forecaster.
    """
    algorithms = algorithms or configuration.bench.algorithms
    baselines = configuration.baselines
    options = {**configuration.engine.state_options(), **(engine_overrides or {})}

    forecasters = []
    for name in algorithms:
        if name == "spinex":
            forecasters.append(SpinexForecaster(options))
        elif name in baselines:
            forecasters.append(BaselineForecaster(baselines[name]))
        else:
            raise ConfigurationError(
                f"Unknown algorithm {name!r}, choose from spinex, {', '.join(baselines)}"
            )
    return forecasters


def write_frame(frame: pd.DataFrame, target: str | Path | IO):
    try:
        frame.to_csv(target, lineterminator="\n")
    except OSError as e:
        raise IoError(f"Cannot write {target}: {e}") from e
