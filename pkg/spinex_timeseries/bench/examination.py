import logging
from collections import Counter
from typing import Iterable

from ..types import *
from .ranking import MAXIMIZED, records_frame


__all__ = ["examine_datasets"]

log = logging.getLogger(__name__)


def examine_datasets(records: Iterable[BenchmarkRecord], top: int = 3) -> dict:
    """
    Find the datasets that are hard or easy across the board. For every (algorithm, metric) pair the dataset with
    that algorithm's worst value counts once as "complex" and the one with its best value once as "consistent".

    @param top: Number of datasets to report per category
    @return: C{{"complex": [{"dataset", "count"}], "consistent": [...]}}, most frequent first, ties by name
    """
    frame = records_frame(records)
    complex_counts, consistent_counts = Counter(), Counter()

    for _, group in frame.groupby("algorithm", sort=True):
        group = group.set_index("dataset").sort_index()
        for metric in BenchmarkRecord.METRICS:
            column = group[metric].dropna()
            if column.empty:
                continue
            best, worst = (column.idxmax(), column.idxmin()) if metric in MAXIMIZED else (column.idxmin(), column.idxmax())
            consistent_counts[best] += 1
            complex_counts[worst] += 1

    def most_common(counts: Counter) -> list[dict]:
        ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
        return [{"dataset": dataset, "count": count} for dataset, count in ordered[:top]]

    result = {"complex": most_common(complex_counts), "consistent": most_common(consistent_counts)}
    log.debug(f"Dataset examination: {result}")
    return result
