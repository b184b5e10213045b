"""
Benchmark execution: every forecaster on every dataset, scored on a holdout of the final C{horizon} observations.
"""
import logging
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import Mapping, Sequence

import numpy as np

from ..baselines import make_forecaster
from ..core import derive_seed
from ..errors import TooShort
from ..forecaster import init_state, predict
from ..metrics import evaluate
from ..types import *
from .synthetic import generate_synthetic


__all__ = [
    "Forecaster", "BaselineForecaster", "SpinexForecaster", "BenchmarkRunner", "run_benchmark", "measure_runtime",
]


########################################################
#
#   Forecasters
#
########################################################

class Forecaster(ABC):
    """ A named forecasting algorithm that can be run on any series """

    def __init__(self, name: str):
        self.name = name

    @abstractmethod
    def forecast(self, series: TimeSeries, horizon: int, seed: int = 0) -> ForecastResult:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


class BaselineForecaster(Forecaster):
    def __init__(self, spec: BaselineSpec, name: str | None = None):
        super().__init__(name or spec.kind)
        self.spec = spec
        self._forecast = make_forecaster(spec)

    def forecast(self, series: TimeSeries, horizon: int, seed: int = 0) -> ForecastResult:
        return self._forecast(series, horizon)


class SpinexForecaster(Forecaster):
    """
    The similarity engine. Every call builds a fresh engine state, so one instance can serve concurrent tasks.

    @param options: Keyword arguments for L{init_state}, except the horizon and seed
    """

    def __init__(self, options: Mapping | None = None, name: str = "spinex"):
        super().__init__(name)
        self.options = dict(options or {})

    def forecast(self, series: TimeSeries, horizon: int, seed: int = 0) -> ForecastResult:
        state = init_state(series, forecast_horizon=horizon, seed=seed, **self.options)
        result = predict(state, series)
        if len(result) < horizon:
            # The engine caps its horizon at a tenth of the series
            raise TooShort(f"Series of {len(series)} observations only supports a horizon of {len(result)}")
        return result


########################################################
#
#   Runner
#
########################################################

class BenchmarkRunner:
    """
    Runs (algorithm, dataset) tasks, serially or on a thread pool. A failing task yields a record with NaN metrics
    and the reason, the run itself never aborts.
    """

    def __init__(self, horizon: int = 5, seed: int = 0, workers: int = 1, logger: logging.Logger | None = None):
        if horizon < 1:
            raise ValueError(f"Horizon must be positive, got {horizon}")
        self.horizon = horizon
        self.seed = seed
        self.workers = max(1, workers)
        self._log = logger or logging.getLogger(__name__)

    @property
    def log(self) -> logging.Logger:
        return self._log

    def run_task(self, forecaster: Forecaster, dataset: str, series: TimeSeries) -> BenchmarkRecord:
        seed = derive_seed(self.seed, forecaster.name, dataset)
        try:
            if len(series) <= self.horizon:
                raise TooShort(f"Dataset has {len(series)} observations, holdout needs more than {self.horizon}")
            train, actual = series[:-self.horizon], series.values[-self.horizon:]
            result = forecaster.forecast(train, self.horizon, seed)
            metrics = evaluate(EvaluationPair(actual=actual, predicted=result.values[:self.horizon]))
        except Exception as e:
            self.log.error(f"{forecaster.name!r} failed on {dataset!r}: {type(e).__name__}: {e}")
            return BenchmarkRecord(
                algorithm=forecaster.name, dataset=dataset,
                direction_accuracy=np.nan, dtw_cost=np.nan, mase=np.nan, mad=np.nan,
                error=f"{type(e).__name__}: {e}",
            )

        return BenchmarkRecord(
            algorithm=forecaster.name,
            dataset=dataset,
            direction_accuracy=metrics.direction_accuracy / 100,
            dtw_cost=metrics.dtw_cost,
            mase=metrics.mase,
            mad=metrics.mad,
        )

    def run(self, datasets: Mapping[str, TimeSeries], algorithms: Sequence[Forecaster]) -> list[BenchmarkRecord]:
        """
        @return: One record per (algorithm, dataset), ordered by algorithm then dataset as given
        """
        names = [forecaster.name for forecaster in algorithms]
        if len(set(names)) != len(names):
            raise ValueError(f"Algorithm names must be unique, got {names}")

        tasks = [(forecaster, name, series) for forecaster in algorithms for name, series in datasets.items()]
        self.log.info(f"Running {len(tasks)} benchmark tasks on {self.workers} worker(s)")

        if self.workers == 1:
            records = [self.run_task(*task) for task in tasks]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                # map keeps the task order
                records = list(pool.map(lambda task: self.run_task(*task), tasks))

        failures = sum(record.error is not None for record in records)
        if failures:
            self.log.warning(f"{failures} of {len(records)} benchmark tasks failed")
        return records


def run_benchmark(
    datasets: Mapping[str, TimeSeries],
    algorithms: Sequence[Forecaster],
    horizon: int = 5,
    seed: int = 0,
    workers: int = 1,
    logger: logging.Logger | None = None,
) -> list[BenchmarkRecord]:
    return BenchmarkRunner(horizon=horizon, seed=seed, workers=workers, logger=logger).run(datasets, algorithms)


def measure_runtime(
    forecaster: Forecaster,
    sizes: Sequence[int] = (50, 500, 5000),
    function: str = "sine",
    horizon: int = 1,
    seed: int = 0,
    repeats: int = 3,
) -> tuple[list[int], list[float]]:
    """
    Time one forecast per size on a synthetic series of that size.

    @return: The sizes and the best wall-clock time in seconds over C{repeats} runs
    """
    times = []
    for size in sizes:
        series = generate_synthetic(SyntheticSpec(function_id=function, n_points=size, seed=seed))
        best = np.inf
        for _ in range(max(1, repeats)):
            start = time.perf_counter()
            forecaster.forecast(series, horizon, seed)
            best = min(best, time.perf_counter() - start)
        times.append(best)
        logging.getLogger(__name__).info(f"{forecaster.name!r} on {size} points: {best:.6f}s")
    return list(sizes), times
