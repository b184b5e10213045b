import json
from importlib.metadata import version

import pandas as pd
import pytest

from spinex_timeseries import __version__
from spinex_timeseries.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("SPINEX_CONFIGURATION", "SPINEX_CONFIG_FILE", "SPINEX_SEED"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def sawtooth_csv(tmp_path):
    path = tmp_path / "sawtooth.csv"
    assert main(["generate", "--function", "sawtooth", "--n", "300", "--tmax", "15", "--sigma", "0", "-o", str(path)]) == 0
    return path


def read(path):
    return json.loads(path.read_text())


def test_generate(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["generate", "--function", "sine", "--n", "100", "--seed", "3", "-o", str(first)]) == EXIT_OK
    assert main(["generate", "--function", "sine", "--n", "100", "--seed", "3", "-o", str(second)]) == EXIT_OK
    assert first.read_text() == second.read_text()
    assert first.read_text().startswith("value\n")
    assert len(first.read_text().splitlines()) == 101


def test_generate_seed_from_environment(tmp_path, monkeypatch):
    explicit, environment = tmp_path / "explicit.csv", tmp_path / "environment.csv"
    main(["generate", "--function", "ar1", "--seed", "9", "-o", str(explicit)])
    monkeypatch.setenv("SPINEX_SEED", "9")
    main(["generate", "--function", "ar1", "-o", str(environment)])
    assert explicit.read_text() == environment.read_text()

    monkeypatch.setenv("SPINEX_SEED", "nine")
    assert main(["generate", "--function", "ar1", "-o", str(tmp_path / "x.csv")]) == EXIT_USAGE


def test_forecast(sawtooth_csv, tmp_path):
    output, plot = tmp_path / "forecast.json", tmp_path / "plot.csv"
    code = main([
        "forecast", "-i", str(sawtooth_csv), "--horizon", "5", "--no-dynamic-window",
        "-o", str(output), "--plot-csv", str(plot),
    ])
    assert code == EXIT_OK
    report = read(output)
    assert report["kind"] == "forecast"
    assert len(report["payload"]["values"]) == 5

    frame = pd.read_csv(plot, index_col="index")
    assert len(frame) == 300
    assert frame["predicted"].notna().sum() == 5


def test_forecast_is_deterministic(sawtooth_csv, tmp_path):
    outputs = [tmp_path / "one.json", tmp_path / "two.json"]
    for output in outputs:
        assert main(["forecast", "-i", str(sawtooth_csv), "--horizon", "4", "--fallback", "-o", str(output)]) == 0
    assert outputs[0].read_text() == outputs[1].read_text()
    assert read(outputs[0])["payload"]["provenance"] == "fallback"


def test_forecast_to_stdout(sawtooth_csv, capsys):
    assert main(["forecast", "-i", str(sawtooth_csv), "--methods", "cosine,euclidean"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["generated_by"] == "spinex_timeseries"


def test_missing_input_is_a_data_error(tmp_path):
    output = tmp_path / "report.json"
    assert main(["forecast", "-i", str(tmp_path / "missing.csv"), "-o", str(output)]) == EXIT_DATA
    assert not output.exists()


def test_malformed_input_is_a_data_error(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("value\n1\n2\nthree\n")
    assert main(["anomalies", "-i", str(path)]) == EXIT_DATA


def test_bad_configuration(sawtooth_csv, tmp_path):
    config = tmp_path / "bad.yaml"
    config.write_text("engine:\n  windows: 3\n")
    assert main(["forecast", "-i", str(sawtooth_csv), "--config", str(config)]) == EXIT_USAGE
    assert main(["forecast", "-i", str(sawtooth_csv), "--configuration", "nonexistent"]) == EXIT_USAGE


def test_usage_errors():
    with pytest.raises(SystemExit) as info:
        main(["forecast"])
    assert info.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        main(["generate", "--function", "tangent"])
    assert info.value.code == EXIT_USAGE


@pytest.mark.parametrize("arguments", [
    ["--horizon", "0"],
    ["--window", "0"],
    ["--window", "-3"],
])
def test_non_positive_engine_arguments(sawtooth_csv, tmp_path, arguments):
    output = tmp_path / "forecast.json"
    with pytest.raises(SystemExit) as info:
        main(["forecast", "-i", str(sawtooth_csv), "-o", str(output), *arguments])
    assert info.value.code == EXIT_USAGE
    assert not output.exists()


def test_non_positive_configured_horizon(sawtooth_csv, tmp_path):
    config = tmp_path / "zero.yaml"
    config.write_text("engine:\n  forecast_horizon: 0\n")
    assert main(["forecast", "-i", str(sawtooth_csv), "--config", str(config)]) == EXIT_USAGE


def test_evaluate(sawtooth_csv, tmp_path):
    output = tmp_path / "metrics.json"
    assert main(["evaluate", "-i", str(sawtooth_csv), "--horizon", "5", "--splits", "2", "-o", str(output)]) == 0
    payload = read(output)["payload"]
    assert payload["completed_splits"] == 2

    predicted = tmp_path / "predicted.csv"
    predicted.write_text("value\n" + "\n".join(sawtooth_csv.read_text().splitlines()[-3:]) + "\n")
    assert main(["evaluate", "-i", str(sawtooth_csv), "--predicted", str(predicted), "-o", str(output)]) == 0
    assert read(output)["payload"]["mae"] == 0


def test_anomalies_and_explain(sawtooth_csv, tmp_path):
    anomalies, explain, neighbors = tmp_path / "anomalies.json", tmp_path / "explain.json", tmp_path / "neighbors.csv"
    assert main(["anomalies", "-i", str(sawtooth_csv), "--percentile", "5", "-o", str(anomalies)]) == 0
    assert read(anomalies)["payload"]["percentile"] == 5

    code = main([
        "explain", "-i", str(sawtooth_csv), "--horizon", "3", "--k", "2", "--neighbors",
        "--neighbors-csv", str(neighbors), "-o", str(explain),
    ])
    assert code == 0
    assert len(read(explain)["payload"]["neighbor_analysis"]["neighbors"]) == 2
    assert list(pd.read_csv(neighbors).columns) == ["position", "current", "neighbor_1", "neighbor_2"]


def test_bench(tmp_path):
    output, records = tmp_path / "bench.json", tmp_path / "records.csv"
    code = main([
        "bench", "--functions", "linear,sine", "--algorithms", "naive,theta", "--n", "80", "--horizon", "4",
        "--csv", str(records), "-o", str(output),
    ])
    assert code == EXIT_OK
    payload = read(output)["payload"]
    assert payload["horizon"] == 4
    assert len(payload["records"]) == 4
    assert len(pd.read_csv(records)) == 16


def test_bench_unknown_algorithm(tmp_path):
    assert main(["bench", "--functions", "linear", "--algorithms", "prophet", "-o", str(tmp_path / "b.json")]) == 1


def test_complexity(tmp_path):
    output = tmp_path / "complexity.json"
    assert main(["complexity", "--sizes", "50,500,5000", "--times", "0.01,0.1,1.0", "-o", str(output)]) == 0
    payload = read(output)["payload"]
    assert payload["class"] == "poly"
    assert payload["exponent_or_rate"] == pytest.approx(1.0)

    assert main(["complexity", "--sizes", "50,500", "--times", "0.1,0.2", "-o", str(output)]) == EXIT_DATA
    assert main(["complexity", "--sizes", "50,500,5000"]) == EXIT_USAGE


def test_complexity_measure(tmp_path):
    output = tmp_path / "measured.json"
    code = main(["complexity", "--measure", "naive", "--sizes", "50,100,200", "--repeats", "1", "-o", str(output)])
    assert code in (EXIT_OK, EXIT_DATA)
    if code == EXIT_OK:
        assert read(output)["payload"]["sizes"] == [50, 100, 200]


def test_version(capsys):
    assert __version__ == version("spinex_timeseries")
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == EXIT_OK
    assert capsys.readouterr().out.strip() == f"spinex {__version__}"
