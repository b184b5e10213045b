"""
Command-line frontend. Reports go to the output file or standard output, diagnostics to standard error.

Exit codes: 0 success, 1 usage or configuration error, 2 data error, 3 internal failure.
"""
import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .bench import (
    benchmark_report, complexity_report, fit_complexity, generate_synthetic, measure_runtime, run_benchmark,
    synthetic_suite, write_records_csv,
)
from .bench.synthetic import CATALOGUE
from .configurations import load_configuration
from .core import load_csv, save_csv, write_report
from .errors import ConfigurationError, DataError, SpinexError
from .model import Model, build_forecasters, write_frame
from .types import *


log = logging.getLogger("spinex_timeseries")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """ Reports usage errors with exit code 1 """

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid int value: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def _csv_list(kind):
    def parse(text: str):
        try:
            return tuple(kind(item) for item in text.split(",") if item.strip())
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e))
    return parse


########################################################
#
#   Parser
#
########################################################

def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", type=Path, help="Report file, standard output when omitted")
    common.add_argument("--seed", type=int, help="Random seed, defaults to $SPINEX_SEED or 0")
    common.add_argument("--config", type=Path, help="YAML file with configuration overrides")
    common.add_argument("--configuration", help="Configuration module, defaults to $SPINEX_CONFIGURATION or 'standard'")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug output")

    engine = ArgumentParser(add_help=False)
    engine.add_argument("-i", "--input", type=Path, required=True, help="CSV file with the series")
    engine.add_argument("--column", help="Value column name or index, defaults to the last column")
    engine.add_argument("--window", type=_positive_int, help="Segment window size, adaptive when omitted")
    engine.add_argument("--horizon", type=_positive_int, help="Forecast horizon (default 1)")
    engine.add_argument("--methods", type=_csv_list(str), help="Comma-separated similarity methods")
    engine.add_argument("--dynamic-window", action=argparse.BooleanOptionalAction, default=None)
    engine.add_argument("--multi-level", action=argparse.BooleanOptionalAction, default=None)
    engine.add_argument("--dynamic-threshold", action=argparse.BooleanOptionalAction, default=None)

    parser = ArgumentParser(prog="spinex", description="Similarity-based time series forecasting")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", parents=[common], help="Write a synthetic series as CSV")
    generate.add_argument("--function", required=True, choices=list(CATALOGUE))
    generate.add_argument("--n", type=_positive_int, default=200, help="Number of points")
    generate.add_argument("--tmax", type=float, default=10.0, help="End of the time grid")
    generate.add_argument("--sigma", type=float, help="Noise level, the catalogue level when omitted")

    forecast = commands.add_parser("forecast", parents=[common, engine], help="Forecast the next values")
    forecast.add_argument("--plot-csv", type=Path, help="Also write index, actual, predicted and bands as CSV")
    forecast.add_argument("--fallback", action="store_true", help="Use the decomposition forecast directly")

    evaluate = commands.add_parser("evaluate", parents=[common, engine], help="Score forecasts")
    evaluate.add_argument("--predicted", type=Path, help="CSV with predictions for the last observations")
    evaluate.add_argument("--splits", type=_positive_int, help="Cross-validation splits (default 3)")

    anomalies = commands.add_parser("anomalies", parents=[common, engine], help="Detect anomalous segments")
    anomalies.add_argument("--percentile", type=float, help="Similarity percentile below which segments are flagged")

    explain = commands.add_parser("explain", parents=[common, engine], help="Explain a forecast")
    explain.add_argument("--k", type=_positive_int, help="Number of segments and neighbors (default 5)")
    explain.add_argument("--neighbors", action="store_true", help="Add the nearest-neighbor analysis to the report")
    explain.add_argument("--neighbors-csv", type=Path, help="Write the plot-ready neighbor segments as CSV")

    bench = commands.add_parser("bench", parents=[common], help="Benchmark forecasters on synthetic data")
    bench.add_argument("--functions", type=_csv_list(str), help="Comma-separated synthetic functions")
    bench.add_argument("--algorithms", type=_csv_list(str), help="Comma-separated algorithms, 'spinex' or baselines")
    bench.add_argument("--datasets", type=Path, nargs="*", default=[], help="Additional CSV datasets")
    bench.add_argument("--horizon", type=_positive_int)
    bench.add_argument("--tmax", type=_csv_list(float), help="Comma-separated t_max values")
    bench.add_argument("--n", type=_csv_list(_positive_int), help="Comma-separated dataset sizes")
    bench.add_argument("--sigma", type=float, help="Noise level for every function")
    bench.add_argument("--workers", type=_positive_int)
    bench.add_argument("--csv", type=Path, help="Also write the flat (algorithm, dataset, metric, value) CSV")

    complexity = commands.add_parser("complexity", parents=[common], help="Fit runtime complexity")
    complexity.add_argument("--sizes", type=_csv_list(int), help="Comma-separated input sizes")
    complexity.add_argument("--times", type=_csv_list(float), help="Comma-separated runtimes in seconds")
    complexity.add_argument("--measure", metavar="ALGORITHM", help="Time an algorithm instead of reading --times")
    complexity.add_argument("--function", default="sine", choices=list(CATALOGUE))
    complexity.add_argument("--repeats", type=_positive_int)

    return parser


########################################################
#
#   Commands
#
########################################################

def _seed(config: argparse.Namespace, default: int = 0) -> int:
    if config.seed is not None:
        return config.seed
    environment = os.getenv("SPINEX_SEED")
    if environment:
        try:
            return int(environment)
        except ValueError:
            raise UsageError(f"SPINEX_SEED must be an integer, got {environment!r}")
    return default


def _column(config: argparse.Namespace):
    if config.column is not None and config.column.lstrip("-").isdigit():
        return int(config.column)
    return config.column


def _model(config: argparse.Namespace, configuration) -> Model:
    return Model(
        load_csv(config.input, _column(config)),
        configuration=configuration,
        logger=log,
        seed=_seed(config),
        window_size=config.window,
        forecast_horizon=config.horizon,
        similarity_methods=config.methods,
        dynamic_window=config.dynamic_window,
        multi_level=config.multi_level,
        dynamic_threshold=config.dynamic_threshold,
    )


def _generate(config, configuration):
    spec = SyntheticSpec(
        function_id=config.function, n_points=config.n, t_max=config.tmax, noise_sigma=config.sigma,
        seed=_seed(config),
    )
    series = generate_synthetic(spec)
    save_csv(series, config.output if config.output is not None else sys.stdout)


def _forecast(config, configuration):
    model = _model(config, configuration)
    result = model.fallback_predict(num_points=model.state.forecast_horizon) if config.fallback else model.predict()
    if config.plot_csv is not None:
        write_frame(model.plot_frame(result), config.plot_csv)
    write_report(model.forecast_report(result), config.output)


def _evaluate(config, configuration):
    model = _model(config, configuration)
    predicted = load_csv(config.predicted) if config.predicted is not None else None
    write_report(model.metrics_report(predicted, config.splits), config.output)


def _anomalies(config, configuration):
    write_report(_model(config, configuration).anomalies_report(config.percentile), config.output)


def _explain(config, configuration):
    model = _model(config, configuration)
    report = model.explain_report(config.k, with_neighbors=config.neighbors)
    if config.neighbors_csv is not None:
        write_frame(model.neighbor_frame(model.neighbor_analysis(config.k)), config.neighbors_csv)
    write_report(report, config.output)


def _bench(config, configuration):
    options = configuration.bench
    seed = _seed(config, options.seed)
    horizon = config.horizon or options.horizon

    datasets = synthetic_suite(
        config.functions or options.functions,
        t_max_values=config.tmax or options.t_max_values,
        n_points_values=config.n or options.n_points_values,
        seed=seed,
        noise_sigma=config.sigma,
    )
    for path in config.datasets:
        datasets[path.stem] = load_csv(path)

    forecasters = build_forecasters(configuration, config.algorithms)
    records = run_benchmark(
        datasets, forecasters, horizon=horizon, seed=seed, workers=config.workers or options.workers, logger=log,
    )
    if config.csv is not None:
        write_records_csv(records, config.csv)
    write_report(benchmark_report(records, horizon, seed), config.output)


def _complexity(config, configuration):
    options = configuration.bench
    seed = _seed(config, options.seed)
    if config.measure:
        forecaster = build_forecasters(configuration, [config.measure])[0]
        sizes, times = measure_runtime(
            forecaster, config.sizes or options.complexity_sizes, function=config.function, seed=seed,
            repeats=config.repeats or options.repeats,
        )
    elif config.sizes and config.times:
        sizes, times = config.sizes, config.times
    else:
        raise UsageError("complexity needs --sizes and --times, or --measure")
    write_report(complexity_report(fit_complexity(sizes, times), seed), config.output)


COMMANDS = {
    "generate": _generate,
    "forecast": _forecast,
    "evaluate": _evaluate,
    "anomalies": _anomalies,
    "explain": _explain,
    "bench": _bench,
    "complexity": _complexity,
}


def _setup_logging(verbosity: int):
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(level)
    log.propagate = False


def dispatch(config: argparse.Namespace) -> int:
    """
    Run one parsed command.

    @return: The exit code
    """
    _setup_logging(getattr(config, "verbose", 0))
    try:
        configuration = load_configuration(config.configuration, logger=log, config_file=config.config)
        COMMANDS[config.command](config, configuration)
    except (UsageError, ConfigurationError) as e:
        log.error(str(e))
        return EXIT_USAGE
    except DataError as e:
        log.error(str(e))
        return EXIT_DATA
    except ValueError as e:
        # parameter validation below the parser, e.g. a zero window from a config file
        log.error(str(e))
        return EXIT_USAGE
    except SpinexError as e:
        log.error(str(e))
        return EXIT_INTERNAL
    except Exception as e:
        log.exception(f"Internal failure: {e}")
        return EXIT_INTERNAL
    return EXIT_OK


def main(argv=None) -> int:
    config = build_parser().parse_args(argv)
    return dispatch(config)


if __name__ == "__main__":
    sys.exit(main())
