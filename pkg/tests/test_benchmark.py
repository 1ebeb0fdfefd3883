import json

import pytest

from ehubsim.benchmark import od_benchmark, sample_od_pairs
from ehubsim.network import TrafficLevel, generate_synthetic_grid, parse_scenario
from ehubsim.network import parse_network_text


@pytest.fixture(scope="module")
def small_config(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("bench")
    net = tmp / "net.jsonl"
    net.write_text(generate_synthetic_grid(4, 4, seed=3), encoding="utf-8")
    return parse_scenario({
        "network": str(net), "seed": 42,
        "stations": {"count": 6, "seed": 2},
    })


class TestSampling:
    def test_pairs_deterministic_and_distinct(self, small_config):
        graph = parse_network_text(
            open(small_config.network_path, encoding="utf-8").read())
        a = sample_od_pairs(graph, 50, seed=42)
        b = sample_od_pairs(graph, 50, seed=42)
        assert a == b
        assert all(o != d for o, d in a)


class TestBenchmark:
    def test_identical_snapshots_give_zero_extra(self, small_config,
                                                 monkeypatch):
        import ehubsim.benchmark as bench
        real = bench.snapshot_for_level
        shared = {}

        def fake(config, level, graph, snapshot_time_s):
            if "snap" not in shared:
                shared["snap"] = real(config, TrafficLevel.LOW, graph,
                                      snapshot_time_s)
            return shared["snap"]

        monkeypatch.setattr(bench, "snapshot_for_level", fake)
        report = od_benchmark(small_config, n_pairs=20,
                              levels=[TrafficLevel.LOW, TrafficLevel.MEDIUM],
                              seed=42, snapshot_time_s=1800)
        assert report.extra_time_s["medium-low"] == [0.0] * (
            20 - report.excluded_pairs)

    def test_small_grid_ordering(self, small_config):
        report = od_benchmark(small_config, n_pairs=40, seed=42,
                              snapshot_time_s=14400)
        assert report.mean_extra_s["high-low"] >= \
            report.mean_extra_s["medium-low"] >= 0.0
        assert report.excluded_pairs <= 4

    def test_report_serializes(self, small_config):
        report = od_benchmark(small_config, n_pairs=10, seed=1,
                              snapshot_time_s=1800)
        parsed = json.loads(report.to_json())
        assert parsed["n_pairs"] == 10
        assert "histograms" in parsed
        csv_text = report.to_csv()
        assert csv_text.splitlines()[0] == \
            "origin,destination,time_low_s,time_medium_s,time_high_s"
        assert len(csv_text.splitlines()) == 11

    def test_histogram_bin_width(self, small_config):
        report = od_benchmark(small_config, n_pairs=10, seed=1,
                              snapshot_time_s=1800)
        for hist in report.histograms.values():
            assert hist["bin_width_s"] == 30.0
            if hist["counts"]:
                assert sum(hist["counts"]) <= 10
