import json

import pytest
from click.testing import CliRunner

from ehubsim.cli import main
from ehubsim.network import generate_synthetic_grid
from tests.conftest import CASSETTES, DATA, FIXTURES


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def scenario_file(tmp_path):
    net = tmp_path / "net.jsonl"
    net.write_text(generate_synthetic_grid(3, 3, seed=5), encoding="utf-8")
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps({
        "network": str(net), "duration_s": 720, "aggregation_window_s": 360,
        "stations": {"count": 3, "seed": 1},
    }), encoding="utf-8")
    return path


class TestSimRun:
    def test_run_with_export(self, runner, scenario_file, tmp_path):
        export = tmp_path / "traffic.jsonl"
        result = runner.invoke(main, ["sim", "run", str(scenario_file),
                                      "--export", str(export)])
        assert result.exit_code == 0, result.output
        summary = json.loads(result.output)
        assert summary["records"] == 2 * 24
        lines = export.read_text(encoding="utf-8").splitlines()
        assert len(lines) == summary["records"]
        json.loads(lines[0])  # newline-delimited JSON

    def test_missing_scenario_errors(self, runner):
        result = runner.invoke(main, ["sim", "run", "missing.json"])
        assert result.exit_code != 0


class TestBenchOd:
    def test_report_shape(self, runner, scenario_file, tmp_path):
        out = tmp_path / "report.json"
        result = runner.invoke(main, [
            "bench", "od", str(scenario_file), "--pairs", "12",
            "--levels", "low,medium", "--seed", "9",
            "--snapshot-time", "720", "--out", str(out)])
        assert result.exit_code == 0, result.output
        report = json.loads(out.read_text(encoding="utf-8"))
        assert len(report["pairs"]) == 12
        assert len(report["times_s"]["low"]) == 12
        assert len(report["times_s"]["medium"]) == 12

    def test_unknown_flag_usage_error(self, runner, scenario_file):
        result = runner.invoke(main, ["bench", "od", str(scenario_file),
                                      "--nonsense", "1"])
        assert result.exit_code != 0
        assert "Usage" in result.output or "no such option" in result.output.lower()


class TestRagCommands:
    def test_schema_export_writes_three_files(self, runner, tmp_path):
        out_dir = tmp_path / "schemas"
        result = runner.invoke(main, [
            "rag", "schema-export", "--seed-dir", str(FIXTURES),
            "--out", str(out_dir)])
        assert result.exit_code == 0, result.output
        names = sorted(p.name for p in out_dir.glob("*.json"))
        assert names == ["online_demo.json", "stations.json", "user_paths.json"]
        body = json.loads((out_dir / "stations.json").read_text("utf-8"))
        assert body["table"] == "stations"

    def test_eval_all_gold_reports_perfect_accuracy(self, runner, tmp_path):
        out = tmp_path / "report.json"
        result = runner.invoke(main, [
            "rag", "eval", "--corpus", str(DATA / "qa_corpus.jsonl"),
            "--backend", f"replay:{CASSETTES / 'all_gold.json'}",
            "--seed-dir", str(FIXTURES), "--out", str(out)])
        assert result.exit_code == 0, result.output
        summary = json.loads(result.output)
        assert summary["system_operator"]["execution_accuracy"] == 1.0
        assert summary["user"]["execution_accuracy"] == 1.0
        report = json.loads(out.read_text(encoding="utf-8"))
        assert len(report["cases"]) == 80


class TestGrid:
    def test_grid_command(self, runner, tmp_path):
        out = tmp_path / "grid.jsonl"
        result = runner.invoke(main, ["grid", "4", "4", "--seed", "3",
                                      "--out", str(out)])
        assert result.exit_code == 0
        assert out.exists()

    def test_bad_dimension_exit_code(self, runner, tmp_path):
        result = runner.invoke(main, ["grid", "1", "4", "--out",
                                      str(tmp_path / "g.jsonl")])
        assert result.exit_code == 1
        assert "INVALID_DIMENSION" in result.output
