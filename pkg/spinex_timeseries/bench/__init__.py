""" Benchmark harness: synthetic datasets, benchmark runs, rankings, Pareto analysis and complexity fits """
from .complexity import fit_complexity
from .examination import examine_datasets
from .pareto import pareto_frontier
from .ranking import rank_all, rank_average, rank_normalized, rank_wins
from .report import benchmark_report, complexity_report, write_records_csv
from .runner import BaselineForecaster, BenchmarkRunner, Forecaster, SpinexForecaster, measure_runtime, run_benchmark
from .synthetic import CATALOGUE, generate_synthetic, synthetic_suite
