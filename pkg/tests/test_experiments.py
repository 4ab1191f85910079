from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from sosclique.experiments import (
    CSV_HEADER,
    CapacityError,
    ExperimentReport,
    TrialConfig,
    concentration_cliques,
    concentration_degree,
    exact_expectation_oracle,
    gap_probe,
    norm_r_a,
    psd_frequency,
    splitmix64,
    trial_seed,
    violation_slack,
)
from sosclique.graphs import Graph, count_cliques, enumerate_all_graphs


def test_splitmix64_reference_values():
    # reference outputs of the SplitMix64 generator seeded with 0: state advances by the golden gamma
    gamma = 0x9E3779B97F4A7C15
    assert splitmix64(gamma) == 0xE220A8397B1DCDAF
    assert splitmix64(2 * gamma % 2**64) == 0x6E789E6AA1B965F4
    assert trial_seed(0, 0) == 0xE220A8397B1DCDAF


def test_trial_config_validation():
    with pytest.raises(ValueError):
        TrialConfig(n=10, trials=0)
    with pytest.raises(ValueError):
        TrialConfig(n=10, epsilon=1.0)
    seeds = {TrialConfig(n=10, trials=50, master_seed=3).seed(i) for i in range(50)}
    assert len(seeds) == 50


def test_violation_slack():
    assert violation_slack(0.01, 100) == pytest.approx(3 * math.sqrt(0.0099 / 100))
    assert 0.01 + violation_slack(0.01, 100) == pytest.approx(0.04, abs=0.001)


def test_reports_deterministic_and_parallel_invariant():
    config = TrialConfig(n=20, trials=6, master_seed=77, epsilon=0.1)
    serial = concentration_cliques(config, 3)
    again = concentration_cliques(config, 3)
    parallel = concentration_cliques(config, 3, workers=2)
    assert serial.to_json() == again.to_json() == parallel.to_json()
    assert serial.to_csv() == parallel.to_csv()


def test_csv_layout():
    report = concentration_cliques(TrialConfig(n=15, trials=4, master_seed=1), 2)
    body = [line for line in report.to_csv().splitlines() if not line.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(body))))
    assert rows[0] == CSV_HEADER
    assert len(rows) == 5
    assert all(row[5] in ("0", "1") for row in rows[1:])
    assert [int(row[1]) for row in rows[1:]] == [trial_seed(1, i) for i in range(4)]
    summary = json.loads(report.to_json())["summary"]
    assert summary["violation_rate"] == summary["violation_count"] / 4


def test_concentration_cliques_trivial_a1():
    report = concentration_cliques(TrialConfig(n=30, trials=5), 1)
    assert report.summary["empirical_max_dev"] == 0
    assert report.violation_count == 0


def test_clique_mean_exact_small():
    graphs = list(enumerate_all_graphs(4))
    assert Fraction(sum(count_cliques(g, 2) for g in graphs), len(graphs)) == 3


def test_concentration_cliques_statistics():
    report = concentration_cliques(TrialConfig(n=40, trials=60, master_seed=5, epsilon=0.05), 3)
    assert report.summary["theory_center"] == pytest.approx(math.comb(40, 3) / 8)
    assert report.summary["rate_ok"]
    assert report.summary["mean_sigmas"] < 5


def test_concentration_degree_trivial_cases():
    full = concentration_degree(TrialConfig(n=20, r=2, trials=5), 4)
    assert all(row["statistic"] == 1 for row in full.rows)
    assert full.summary["empirical_max_dev"] == 0
    config = TrialConfig(n=16, r=2, trials=5, master_seed=9)
    zero = concentration_degree(config, 0)
    cliques = concentration_cliques(config, 4)
    assert [row["statistic"] for row in zero.rows] == [row["statistic"] for row in cliques.rows]
    with pytest.raises(ValueError):
        concentration_degree(config, 5)


def test_norm_r_a_small():
    report = norm_r_a(TrialConfig(n=40, trials=3, epsilon=0.01), 2)
    assert report.summary["bound_valid"] is False
    assert report.violation_count == 0
    assert all(row["ratio"] == pytest.approx(row["statistic"] / 40 ** 1.5) for row in report.rows)
    dense = norm_r_a(TrialConfig(n=40, trials=2, epsilon=0.01), 2, dense_max=10**6)
    operator = norm_r_a(TrialConfig(n=40, trials=2, epsilon=0.01), 2, dense_max=10)
    assert [r["route"] for r in dense.rows] == ["dense"] * 2
    assert [r["route"] for r in operator.rows] == ["operator"] * 2
    for a, b in zip(dense.rows, operator.rows):
        assert a["statistic"] == pytest.approx(b["statistic"], rel=1e-8)
    with pytest.raises(ValueError):
        norm_r_a(TrialConfig(n=5), 3)


def test_psd_frequency_complete_injection():
    report = psd_frequency(TrialConfig(n=10, r=2, k=4, trials=3, master_seed=2), inject_complete=True)
    first = report.rows[0]
    assert first["seed"] == "complete"
    assert first["mprime_psd"] and first["block_psd"] and first["grigoriev_match"]
    assert report.violation_count == 0
    assert all(row["block_equals_mprime_block"] for row in report.rows)


def test_psd_frequency_capacity():
    with pytest.raises(CapacityError):
        psd_frequency(TrialConfig(n=200, r=2, k=4))


def test_psd_frequency_large_k_reports_failures():
    report = psd_frequency(TrialConfig(n=16, r=2, k=8, trials=3, master_seed=1))
    assert report.summary["trials"] == 3
    assert report.violation_count == 0


def test_oracle_examples():
    report = exact_expectation_oracle(4, 1, 2)
    assert report.passed and report.graphs == 64 and report.first_discrepancy is None
    assert exact_expectation_oracle(3, 1, 2).passed
    with pytest.raises(CapacityError):
        exact_expectation_oracle(6, 1, 2)
    assert json.loads(json.dumps(report.to_dict()))["passed"] is True


def test_gap_probe_complete_graph():
    probe = gap_probe(10, 2, 0, range(4, 11), graph=Graph.complete(10))
    assert all(row["psd"] for row in probe.curve)
    assert probe.largest_psd_k == 10 and probe.downward_closed
    with pytest.raises(ValueError):
        gap_probe(10, 2, 0, range(2, 5))


def test_gap_probe_sampled_reports_curve():
    probe = gap_probe(14, 2, 3, range(4, 9))
    assert [row["k"] for row in probe.curve] == [4, 5, 6, 7, 8]
    assert isinstance(probe.downward_closed, bool)
    assert "curve" in probe.to_dict()
