import json

import pytest

from gcsim.cli import main
from gcsim.errors import SchemaError
from gcsim.latency import LatencyParams
from gcsim.plots import render
from gcsim.records import summarize_records, write_records_csv
from gcsim.simulator import ExperimentConfig, IterationRecord, run_seed

LAT = LatencyParams(mu_slow=0.1, mu_fast=10.0, alpha=0.01, switch_prob=0.05)


@pytest.fixture(scope="module")
def records():
    config = ExperimentConfig(
        num_workers=12,
        num_clusters=4,
        load=2,
        memberships=2,
        iterations=15,
        latency=LAT,
        initial_slow_count=6,
        master_seed=8,
    )
    return run_seed(config, 0)


@pytest.fixture()
def records_csv(records, tmp_path):
    path = tmp_path / "records.csv"
    write_records_csv(path, records)
    return path


class TestBarChart:
    def test_bar_heights_match_summary_means(self, records, records_csv, tmp_path):
        out = tmp_path / "bar.png"
        values = render(records_csv, "avg-completion-bar", out)
        assert out.exists()
        summary = summarize_records(records)
        assert values["schemes"][0] == "LB"
        assert values["schemes"] == ["LB", "GC-DC", "GC-SC", "GC"]
        for scheme, height in zip(values["schemes"], values["values"]):
            assert height == pytest.approx(summary[scheme]["mean"], rel=1e-12)
        sidecar = json.loads((tmp_path / "bar.png.values.json").read_text())
        assert sidecar == values

    def test_equal_columns_give_equal_bars(self, tmp_path):
        twin = [
            IterationRecord(0, t, scheme, 2.5, 1, (1,), True, False)
            for t in range(1, 4)
            for scheme in ("GC", "GC-SC")
        ]
        path = tmp_path / "twin.csv"
        write_records_csv(path, twin)
        values = render(path, "avg-completion-bar", tmp_path / "twin.png")
        assert values["values"][0] == values["values"][1]


class TestOtherKinds:
    def test_running_mean_line(self, records, records_csv, tmp_path):
        out = tmp_path / "line.png"
        values = render(records_csv, "running-mean-line", out)
        assert out.exists()
        series = values["series"]["GC"]
        assert series["iterations"][0] == 1
        # Final cumulative mean equals the plain mean of the series.
        gc_times = [r.completion_time for r in records if r.scheme == "GC"]
        assert series["running_mean"][-1] == pytest.approx(
            sum(gc_times) / len(gc_times)
        )

    def test_spread_histogram(self, records, records_csv, tmp_path):
        out = tmp_path / "hist.png"
        values = render(records_csv, "spread-histogram", out)
        assert out.exists()
        for scheme in values["schemes"]:
            n = sum(values["counts"][scheme])
            assert n == sum(1 for r in records if r.scheme == scheme)


class TestErrors:
    def test_empty_csv_errors(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        with pytest.raises(SchemaError):
            render(empty, "avg-completion-bar", tmp_path / "x.png")

    def test_unknown_kind(self, records_csv, tmp_path):
        with pytest.raises(SchemaError):
            render(records_csv, "pie", tmp_path / "x.png")

    def test_cli_plot_schema_exit_code(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("nope\n1\n")
        code = main(
            ["plot", str(bad), "--kind", "avg-completion-bar", "--out", str(tmp_path / "x.png")]
        )
        assert code == 2

    def test_cli_plot_happy_path(self, records_csv, tmp_path):
        out = tmp_path / "fig.png"
        code = main(["plot", str(records_csv), "--out", str(out)])
        assert code == 0
        assert out.exists()
        assert (tmp_path / "fig.png.values.json").exists()
