from __future__ import annotations

import json
import subprocess
import sys

import pytest

from sosclique import __version__
from sosclique.certificate import load_matrix
from sosclique.cli import run
from sosclique.graphs import read_graph


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert call(capsys, "gen", "--n", "50", "--seed", "7", "--out", str(a))[0] == 0
    assert call(capsys, "gen", "--n", "50", "--seed", "7", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    meta = json.loads((tmp_path / "a.txt.meta.json").read_text())
    assert meta["seed"] == 7 and meta["tool_version"] == __version__
    assert read_graph(a).n == 50


def test_gen_plant(tmp_path, capsys):
    code, out, _ = call(capsys, "gen", "--n", "12", "--k", "12", "--seed", "1")
    assert code == 0
    assert out.splitlines()[0] == "12 66"


def test_usage_errors(capsys):
    code, out, err = call(capsys, "gen", "--seed", "1")
    assert code == 2 and "--n" in err and out == ""
    code, _, err = call(capsys, "bogus")
    assert code == 2 and "usage" in err
    code, _, err = call(capsys, "gen", "--n", "5", "--bogus-flag")
    assert code == 2 and "usage" in err
    code, _, err = call(capsys, "bounds", "--name", "r_a", "--a", "1", "--n", "100", "--epsilon", "1.5")
    assert code == 2
    code, _, err = call(capsys, "verify", "--graph", "/nonexistent/graph.txt", "--r", "1", "--k", "2")
    assert code == 2 and "cannot read" in err


def test_verify_sampled_graph(tmp_path, capsys):
    g = tmp_path / "g.txt"
    call(capsys, "gen", "--n", "20", "--seed", "3", "--out", str(g))
    code, out, _ = call(capsys, "verify", "--graph", str(g), "--r", "2", "--k", "4", "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert report["axioms"]["non_clique"] == [] and report["axioms"]["recurrence"] == []
    assert report["kernel"]["recurrence_failures"] == [] and report["kernel"]["non_clique_failures"] == []
    assert report["meta"]["flags"]["graph"] == str(g)


def test_verify_csv_default(tmp_path, capsys):
    g = tmp_path / "g.txt"
    call(capsys, "gen", "--n", "10", "--seed", "4", "--out", str(g))
    code, out, _ = call(capsys, "verify", "--graph", str(g), "--r", "1", "--k", "2")
    assert code == 0
    assert out.startswith("# tool_version")
    assert "key,value" in out and "axioms.ok,True" in out


def test_experiment_oracle(capsys):
    code, out, _ = call(capsys, "experiment", "oracle", "--n", "4", "--r", "1", "--k", "2")
    assert code == 0
    report = json.loads(out)
    assert report["passed"] and report["checks"]["avg_m_prime"]


def test_round_trip_is_reproducible(tmp_path, capsys):
    outputs = []
    for attempt in range(2):
        g, m = tmp_path / f"g{attempt}.txt", tmp_path / f"m{attempt}.csv"
        assert call(capsys, "gen", "--n", "11", "--seed", "5", "--out", str(g))[0] == 0
        assert call(capsys, "matrix", "--graph", str(g), "--r", "2", "--k", "4", "--target", "mprime",
                    "--out", str(m))[0] == 0
        code, out, _ = call(capsys, "spectrum", "--matrix", str(m), "--format", "json")
        assert code == 0
        spectrum = json.loads(out)
        outputs.append((load_matrix(m).matrix, spectrum["eigenvalues"], spectrum["min"]))
    assert outputs[0][0] == outputs[1][0]
    assert outputs[0][1] == outputs[1][1]


def test_spectrum_csv_uses_17_digits(tmp_path, capsys):
    code, out, _ = call(capsys, "spectrum", "--n", "10", "--r", "1", "--k", "2", "--target", "e")
    assert code == 0
    rows = [line for line in out.splitlines() if not line.startswith("#")]
    assert rows[0] == "index,normalized,eigenvalue"
    assert float(rows[1].split(",")[2]) == pytest.approx(4.0, rel=1e-12)


@pytest.mark.parametrize("target", ["m", "mprime", "l", "delta", "full"])
def test_matrix_targets(tmp_path, capsys, target):
    g = tmp_path / "g.txt"
    call(capsys, "gen", "--n", "8", "--seed", "2", "--out", str(g))
    code, out, _ = call(capsys, "matrix", "--graph", str(g), "--r", "2", "--k", "4", "--target", target)
    assert code == 0 and '"target"' not in out.splitlines()[-1]
    assert f"# target: \"{target}\"" in out


def test_matrix_graph_free_targets(capsys):
    for target in ("e", "exm", "grigoriev"):
        code, out, _ = call(capsys, "matrix", "--n", "6", "--r", "1", "--k", "2", "--target", target,
                            "--format", "json")
        assert code == 0
        assert json.loads(out)["meta"]["target"] == target


def test_decompose_writes_parts(tmp_path, capsys):
    g = tmp_path / "g.txt"
    call(capsys, "gen", "--n", "9", "--seed", "8", "--out", str(g))
    out_path = tmp_path / "dec.json"
    code, _, _ = call(capsys, "decompose", "--graph", str(g), "--r", "2", "--k", "4",
                      "--out", str(out_path), "--format", "json")
    assert code == 0
    report = json.loads(out_path.read_text())
    assert report["identity_holds"] is True
    for name in ("e", "l", "delta"):
        assert load_matrix(report["written"][name]).matrix.shape == (36, 36)


def test_bounds_passthrough(capsys):
    code, out, _ = call(capsys, "bounds", "--name", "k_threshold", "--n", "1000", "--r", "2",
                        "--constant-c", "0.5", "--format", "json")
    assert code == 0
    assert json.loads(out)["inputs"]["constant_c"] == 0.5
    code, out, _ = call(capsys, "bounds", "--name", "l_budget", "--n", "100", "--r", "1", "--k", "4",
                        "--constant-c", "3", "--format", "json")
    assert json.loads(out)["inputs"]["constant_c"] == 3.0
    code, out, _ = call(capsys, "bounds", "--name", "mcdiarmid", "--n", "100", "--lipschitz", "1",
                        "--t", "0", "--format", "json")
    assert json.loads(out)["value"] == 1.0
    code, _, _ = call(capsys, "bounds", "--name", "trace", "--n", "100")
    assert code == 2


def test_experiment_trials_csv(capsys):
    code, out, _ = call(capsys, "experiment", "cliques", "--n", "20", "--a", "3", "--trials", "4", "--seed", "9")
    assert code == 0
    lines = [line for line in out.splitlines() if not line.startswith("#")]
    assert lines[0] == "trial,seed,statistic,center,threshold,violation"
    assert len(lines) == 5
    code, out, _ = call(capsys, "experiment", "psd", "--n", "8", "--r", "2", "--k", "4", "--trials", "2",
                        "--inject-complete", "--format", "json")
    assert code == 0 and json.loads(out)["rows"][0]["seed"] == "complete"
    code, out, _ = call(capsys, "experiment", "gap", "--n", "10", "--r", "2", "--k-max", "6")
    assert code == 0 and len(json.loads(out)["curve"]) == 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sosclique", "gen"], capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr
    proc = subprocess.run([sys.executable, "-m", "sosclique", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
