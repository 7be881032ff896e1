"""CLI: trace generation, runs, sweeps, config validation, exit codes."""

import csv
import hashlib
import json

import pytest

from prioheap.cli import DEFAULT_CONFIG, REPORT_COLUMNS, main


def write_config(tmp_path, **overrides):
    config = {
        "config_id": "t",
        "seed": 11,
        "output": str(tmp_path / "report.csv"),
        "heap": {"capacity_bytes": 4 * 1024 * 1024},
        "workload": {"unique_keys": 150, "length": 800},
    }
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(config.get(key), dict):
            config[key].update(value)
        else:
            config[key] = value
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    return path, config


def read_report(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestGenTrace:
    def test_writes_file_with_length_lines(self, tmp_path, capsys):
        out = tmp_path / "x.trace"
        rc = main(["gen-trace", "--keys", "50", "--length", "300",
                   "--seed", "3", "--out", str(out)])
        assert rc == 0
        assert len(out.read_text().splitlines()) == 300
        assert "300 events" in capsys.readouterr().out

    def test_seed_repeat_identical_hash(self, tmp_path):
        outs = [tmp_path / "a.trace", tmp_path / "b.trace"]
        for out in outs:
            assert main(["gen-trace", "--keys", "50", "--length", "200",
                         "--seed", "9", "--out", str(out)]) == 0
        digests = [hashlib.sha256(o.read_bytes()).hexdigest() for o in outs]
        assert digests[0] == digests[1]

    def test_invalid_spec_exits_2(self, tmp_path):
        rc = main(["gen-trace", "--min", "50000", "--max", "10000",
                   "--out", str(tmp_path / "x.trace")])
        assert rc == 2


class TestRun:
    def test_minimal_config_one_row(self, tmp_path):
        path, config = write_config(tmp_path)
        assert main(["run", "--config", str(path)]) == 0
        rows = read_report(config["output"])
        assert rows[0] == REPORT_COLUMNS
        assert len(rows) == 2
        assert rows[1][0] == "t"

    def test_rows_parse_back_losslessly(self, tmp_path):
        path, config = write_config(tmp_path)
        main(["run", "--config", str(path)])
        main(["run", "--config", str(path)])  # appends
        rows = read_report(config["output"])
        assert len(rows) == 3
        for row in rows[1:]:
            assert len(row) == len(REPORT_COLUMNS)
            for col in row[3:]:
                int(col)  # numeric fields survive the round trip

    def test_unknown_field_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"config_id": "x", "bogus": 1}))
        assert main(["run", "--config", str(path)]) == 2

    def test_missing_trace_file_exits_2(self, tmp_path):
        path, _ = write_config(tmp_path, workload={"trace_file": "/nope.trace"})
        assert main(["run", "--config", str(path)]) == 2

    def test_missing_config_exits_2(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "none.json")]) == 2

    def test_crash_exits_3_and_writes_row(self, tmp_path):
        path, config = write_config(
            tmp_path,
            heap={"capacity_bytes": 200_000},
            workload={"unique_keys": 40, "min_value": 30_000,
                      "max_value": 60_000, "length": 60},
            cache={"kind": "baseline", "max_entries": 1000},
        )
        assert main(["run", "--config", str(path)]) == 3
        rows = read_report(config["output"])
        assert rows[1][-1] == "1"

    def test_pressure_writes_series_file(self, tmp_path):
        path, config = write_config(
            tmp_path,
            heap={"capacity_bytes": 1_200_000},
            workload={"unique_keys": 100, "length": 600},
            experiment={"kind": "pressure", "pressure_node_bytes": 2048},
            cache={"bound": {"mode": "adaptive_reserve", "value": 300_000}},
        )
        assert main(["run", "--config", str(path)]) == 0
        series = tmp_path / "report_gc_series.csv"
        assert series.exists()
        rows = read_report(series)
        assert rows[0][:2] == ["event_index", "gc_time_ns"]
        assert len(rows) >= 2

    def test_multi_frequency_two_rows(self, tmp_path):
        path, config = write_config(
            tmp_path,
            workload={"unique_keys": 80, "length": 400},
            experiment={"kind": "multi_frequency", "ratio": 3,
                        "total_requests": 400},
            cache={"bound": {"mode": "fraction_heap", "value": 0.2}},
        )
        assert main(["run", "--config", str(path)]) == 0
        rows = read_report(config["output"])
        assert [r[0] for r in rows[1:]] == ["t:a", "t:b"]
        assert int(rows[1][6]) + int(rows[1][7]) == 300  # ratio 3 of 400


class TestSweep:
    def test_three_point_sweep_three_rows(self, tmp_path):
        path, config = write_config(tmp_path)
        rc = main(["sweep", "--config", str(path), "--param", "bound",
                   "--values", "0.1,0.3,0.5"])
        assert rc == 0
        rows = read_report(config["output"])
        assert len(rows) == 4
        assert [r[1] for r in rows[1:]] == [
            "fraction_heap:0.1", "fraction_heap:0.3", "fraction_heap:0.5"]

    def test_duplicate_values_deduplicated(self, tmp_path):
        path, config = write_config(tmp_path)
        assert main(["sweep", "--config", str(path), "--param", "bound",
                     "--values", "0.2,0.2,0.4"]) == 0
        assert len(read_report(config["output"])) == 3

    def test_baseline_sweep_patches_entry_count(self, tmp_path):
        path, config = write_config(
            tmp_path, cache={"kind": "baseline", "max_entries": 10})
        assert main(["sweep", "--config", str(path), "--param", "bound",
                     "--values", "5,20"]) == 0
        rows = read_report(config["output"])
        assert [r[1] for r in rows[1:]] == ["entries:5", "entries:20"]

    def test_bad_values_exit_2(self, tmp_path):
        path, _ = write_config(tmp_path)
        assert main(["sweep", "--config", str(path), "--param", "bound",
                     "--values", "a,b"]) == 2
        assert main(["sweep", "--config", str(path), "--param", "nope",
                     "--values", "1"]) == 2


class TestDefaultsAndEnv:
    def test_print_defaults_round_trips(self, capsys):
        assert main(["print-defaults"]) == 0
        assert json.loads(capsys.readouterr().out) == DEFAULT_CONFIG

    def test_env_seed_overrides_config(self, tmp_path, monkeypatch):
        path, config = write_config(tmp_path)
        main(["run", "--config", str(path)])
        monkeypatch.setenv("PRIOHEAP_SEED", "999")
        main(["run", "--config", str(path)])
        rows = read_report(config["output"])
        assert rows[1] != rows[2]  # different seed, different outcome

    def test_same_seed_identical_rows(self, tmp_path):
        path, config = write_config(tmp_path)
        main(["run", "--config", str(path)])
        main(["run", "--config", str(path)])
        rows = read_report(config["output"])
        assert rows[1] == rows[2]
