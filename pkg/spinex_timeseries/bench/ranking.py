"""
Ranking schemes over benchmark records. Direction accuracy is maximized, every other metric minimized; NaN always
ranks last.
"""
import logging
from typing import Iterable

import pandas as pd

from ..errors import EmptyInput
from ..types import *


__all__ = ["records_frame", "metric_means", "rank_average", "rank_normalized", "rank_wins", "rank_all"]

log = logging.getLogger(__name__)

MAXIMIZED = ("direction_accuracy",)


def records_frame(records: Iterable[BenchmarkRecord]) -> pd.DataFrame:
    """ Long frame with one row per (algorithm, dataset) and one column per benchmark metric """
    frame = pd.DataFrame(
        [[record.algorithm, record.dataset, *(getattr(record, m) for m in BenchmarkRecord.METRICS)] for record in records],
        columns=["algorithm", "dataset", *BenchmarkRecord.METRICS],
    )
    if frame.empty:
        raise EmptyInput("Ranking needs at least one benchmark record")
    return frame.astype({metric: float for metric in BenchmarkRecord.METRICS})


def metric_means(frame: pd.DataFrame) -> pd.DataFrame:
    """ Cross-dataset mean of every metric per algorithm, ignoring failed datasets """
    return frame.groupby("algorithm")[list(BenchmarkRecord.METRICS)].mean().sort_index()


def _rank_columns(values: pd.DataFrame, method: str) -> pd.DataFrame:
    return pd.DataFrame({
        f"{metric}_rank": values[metric].rank(method=method, ascending=metric not in MAXIMIZED, na_option="bottom")
        for metric in BenchmarkRecord.METRICS
    }, index=values.index)


def _finish(scheme: RankingScheme, table: pd.DataFrame, score: str, granularity: str) -> RankingTable:
    table["final_rank"] = table[score].rank(method="min", na_option="bottom").astype(int)
    table = table.reset_index().sort_values(["final_rank", "algorithm"]).set_index("algorithm")
    log.debug(f"Ranking {scheme.value!r}: {table['final_rank'].to_dict()}")
    return RankingTable(scheme=scheme, table=table, granularity=granularity)


def rank_average(records: Iterable[BenchmarkRecord]) -> RankingTable:
    """
    Rank every metric across algorithms on each dataset (ties share the average rank), average the ranks over the
    datasets and over the four metrics, and order by that average.
    """
    frame = records_frame(records)
    per_dataset = []
    for _, group in frame.groupby("dataset", sort=True):
        per_dataset.append(_rank_columns(group.set_index("algorithm"), "average"))
    ranks = pd.concat(per_dataset).groupby(level=0).mean().sort_index()

    table = metric_means(frame).join(ranks)
    table["average_rank"] = ranks.mean(axis=1)
    granularity = "dataset" if frame["dataset"].nunique() > 1 else "single"
    return _finish(RankingScheme.AVERAGE, table, "average_rank", granularity)


def rank_normalized(records: Iterable[BenchmarkRecord]) -> RankingTable:
    """
    Min-max normalize the cross-dataset metric means so that 0 is best in every column (direction accuracy inverted),
    and order by the mean normalized score. Constant columns normalize to 0, missing means to 1.
    """
    means = metric_means(records_frame(records))
    normalized = {}
    for metric in BenchmarkRecord.METRICS:
        column = means[metric]
        low, high = column.min(), column.max()
        if not high > low:
            scaled = pd.Series(0.0, index=column.index)
        elif metric in MAXIMIZED:
            scaled = (high - column) / (high - low)
        else:
            scaled = (column - low) / (high - low)
        normalized[f"{metric}_normalized"] = scaled.where(column.notna(), 1.0)

    table = means.join(pd.DataFrame(normalized))
    table["average_normalized_score"] = pd.DataFrame(normalized).mean(axis=1)
    return _finish(RankingScheme.NORMALIZED, table, "average_normalized_score", "aggregate")


def rank_wins(records: Iterable[BenchmarkRecord]) -> RankingTable:
    """ Competition ranks per metric on the cross-dataset means, averaged over the four metrics """
    means = metric_means(records_frame(records))
    ranks = _rank_columns(means, "min")
    table = means.join(ranks)
    table["average_rank"] = ranks.mean(axis=1)
    return _finish(RankingScheme.WINS, table, "average_rank", "aggregate")


def rank_all(records: Iterable[BenchmarkRecord]) -> dict[str, RankingTable]:
    records = list(records)
    return {
        RankingScheme.AVERAGE.value: rank_average(records),
        RankingScheme.NORMALIZED.value: rank_normalized(records),
        RankingScheme.WINS.value: rank_wins(records),
    }
