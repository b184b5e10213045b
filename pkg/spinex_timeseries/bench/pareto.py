import logging
from typing import Iterable

import numpy as np

from ..types import *
from .ranking import MAXIMIZED, metric_means, records_frame


__all__ = ["pareto_frontier", "dominates"]

log = logging.getLogger(__name__)


def dominates(a: np.ndarray, b: np.ndarray) -> bool:
    """ C{a} is no worse than C{b} everywhere and strictly better somewhere (smaller is better) """
    return bool(np.all(a <= b) and np.any(a < b))


def pareto_frontier(records: Iterable[BenchmarkRecord]) -> dict[str, bool]:
    """
    Mark every algorithm that no other algorithm dominates on the min-max normalized cross-dataset metric means.
    Direction accuracy is inverted so smaller is better everywhere; a missing mean counts as the worst value.

    @return: Efficiency flag per algorithm, in algorithm order
    """
    means = metric_means(records_frame(records))
    columns = []
    for metric in BenchmarkRecord.METRICS:
        column = means[metric].to_numpy(dtype=float)
        if metric in MAXIMIZED:
            column = -column
        finite = column[np.isfinite(column)]
        if finite.size == 0 or np.ptp(finite) == 0:
            scaled = np.zeros_like(column)
        else:
            scaled = (column - finite.min()) / np.ptp(finite)
        columns.append(np.where(np.isfinite(column), scaled, np.inf))
    points = np.column_stack(columns)

    flags = {}
    for i, algorithm in enumerate(means.index):
        flags[algorithm] = not any(dominates(points[j], points[i]) for j in range(len(points)) if j != i)
    log.info(f"Pareto-efficient algorithms: {[name for name, efficient in flags.items() if efficient]}")
    return flags
