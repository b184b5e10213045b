from pathlib import Path
from typing import IO, Iterable

import pandas as pd

from ..errors import IoError
from ..types import *
from .examination import examine_datasets
from .pareto import pareto_frontier
from .ranking import rank_all


__all__ = ["benchmark_report", "complexity_report", "records_long_frame", "write_records_csv"]


def benchmark_report(records: Iterable[BenchmarkRecord], horizon: int, seed: int) -> Report:
    records = list(records)
    payload = {
        "horizon": horizon,
        "seed": seed,
        "records": [record.dump() for record in records],
        "rankings": {scheme: table.dump() for scheme, table in rank_all(records).items()},
        "pareto": pareto_frontier(records),
        "examination": examine_datasets(records),
    }
    return Report(kind=ReportKind.BENCHMARK, payload=payload, seed=seed)


def complexity_report(fit: ComplexityFit, seed: int = 0) -> Report:
    return Report(kind=ReportKind.COMPLEXITY, payload=fit.dump(), seed=seed)


def records_long_frame(records: Iterable[BenchmarkRecord]) -> pd.DataFrame:
    """ One row per (algorithm, dataset, metric) """
    rows = [
        (record.algorithm, record.dataset, metric, getattr(record, metric))
        for record in records
        for metric in BenchmarkRecord.METRICS
    ]
    return pd.DataFrame(rows, columns=["algorithm", "dataset", "metric", "value"])


def write_records_csv(records: Iterable[BenchmarkRecord], target: str | Path | IO):
    try:
        records_long_frame(records).to_csv(target, index=False, lineterminator="\n")
    except OSError as e:
        raise IoError(f"Cannot write {target}: {e}") from e
