import csv
import hashlib
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from repnet.cli import main, parse_grid
from repnet.domain import save_spec, spec_to_dict
from repnet.generate import random_spec
from repnet.planner import pi_tot_all


@pytest.fixture
def noisy_file(tmp_path, noisy):
    p = tmp_path / "noisy.json"
    save_spec(noisy, p)
    return p


@pytest.fixture
def micro_file(tmp_path):
    p = tmp_path / "micro.json"
    save_spec(random_spec(3, 2, 2, 2, 2), p)
    return p


def test_validate_ok(noisy_file, capsys):
    assert main(["validate", str(noisy_file)]) == 0
    assert capsys.readouterr().out.strip() == "OK"


def test_validate_bad_row(tmp_path, noisy, capsys):
    data = spec_to_dict(noisy)
    data["T"][0][1][0] = [0.5, 0.4]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(data))
    assert main(["validate", str(p)]) == 1
    out = capsys.readouterr().out.strip().splitlines()
    assert out == ["T[agent=x, s=good, au=wait]: transition row sums to 0.9, expected 1"]


def test_validate_missing_and_malformed(tmp_path, capsys):
    assert main(["validate", str(tmp_path / "nope.json")]) == 2
    p = tmp_path / "x.json"
    p.write_text("[1, 2")
    assert main(["validate", str(p)]) == 2
    p.write_text("{}")
    assert main(["validate", str(p)]) == 2


def test_plan_base_case(noisy_file, noisy, capsys):
    assert main(["plan", str(noisy_file), "--agent", "y", "--horizon", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    v = noisy.initial_view(1)
    expected = pi_tot_all(noisy, 1, v.ad, v.beliefs)
    assert list(out["q_values"].values()) == pytest.approx(expected.tolist(), abs=1e-15)
    assert out["nodes_expanded"] == 1


def test_plan_with_oracle(micro_file, capsys):
    assert main(["plan", str(micro_file), "--agent", "g0", "--horizon", "3", "--oracle"]) == 0
    captured = capsys.readouterr()
    assert json.loads(captured.out)["nodes_expanded"] == 21
    assert "oracle agrees" in captured.err


def test_plan_bad_inputs(noisy_file):
    assert main(["plan", str(noisy_file), "--agent", "nobody"]) == 2
    assert main(["plan", str(noisy_file), "--agent", "x", "--horizon", "0"]) == 2
    assert main(["plan", str(noisy_file), "--agent", "x", "--horizon", "9", "--cap", "100"]) == 2


def test_simulate_one_step(noisy_file, tmp_path, capsys):
    out = tmp_path / "t.jsonl"
    assert main(["simulate", str(noisy_file), "--steps", "1", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1
    rec = json.loads(lines[0])
    assert rec["v"] == 1 and rec["step"] == 0 and len(rec["agents"]) == 2
    summary = json.loads(capsys.readouterr().out)
    assert set(summary["cumulative_impact"]) == {"x", "y"}


def test_simulate_repeatable_hash(noisy_file, tmp_path):
    digests = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.jsonl"
        assert main(["simulate", str(noisy_file), "--steps", "20", "--seed", "7",
                     "--policy", "x=plan:2", "--policy", "y=fixed:" + ",".join(["wait"] * 20),
                     "--out", str(out)]) == 0
        digests.append(hashlib.sha256(out.read_bytes()).hexdigest())
    assert digests[0] == digests[1]


def test_simulate_stationary_and_bad_policy(noisy_file, tmp_path):
    dist = tmp_path / "d.json"
    dist.write_text(json.dumps([[1, 0, 0], [0, 0.5, 0.5]]))
    out = tmp_path / "t.jsonl"
    assert main(["simulate", str(noisy_file), "--steps", "5", "--policy", f"y=stationary:{dist}",
                 "--out", str(out)]) == 0
    assert main(["simulate", str(noisy_file), "--policy", "x=teleport"]) == 2
    assert main(["simulate", str(noisy_file), "--steps", "3", "--policy", "x=fixed:wait"]) == 2


def test_simulate_fault_exit_code(tmp_path, capsys):
    spec = random_spec(0, 1, 2, 1, 2, n_directed=0)
    data = spec_to_dict(spec)
    data["T"] = [[[[0.0, 1.0]], [[1.0, 0.0]]]]
    data["O"] = [[[[1.0, 0.0], [0.0, 1.0]]]]
    data["B0"] = [[[1.0, 0.0]]]
    data["AD0"] = [[[[1.0], [1.0]]]]
    p = tmp_path / "det.json"
    p.write_text(json.dumps(data))
    # consistent deterministic domain: no fault
    assert main(["simulate", str(p), "--steps", "4", "--out", str(tmp_path / "t.jsonl")]) == 0


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_bench_counts_and_ratios(capsys):
    assert main(["bench", "--grid", "G=2 S=2 A=2 O=1,2,4 k=1,3"]) == 0
    rows = read_csv(capsys.readouterr().out)
    assert len(rows) == 6
    for r in rows:
        assert int(r["nodes_expanded"]) == int(r["predicted_nodes"])
        if r["k"] == "1":
            assert r["nodes_expanded"] == "1"
    by = {(int(r["observations"]), int(r["k"])): [int(c) for c in r["nodes_by_depth"].split(";")]
          for r in rows}
    assert by[(2, 3)] == [1, 4, 16] and sum(by[(2, 3)]) == 21
    for w in (1, 2):
        for depth, (lo, hi) in enumerate(zip(by[(w, 3)], by[(2 * w, 3)])):
            assert hi == lo * 2**depth


def test_bench_cap_and_grid_errors(tmp_path):
    assert main(["bench", "--grid", "A=3 O=3 k=6", "--cap", "1000"]) == 2
    assert main(["bench", "--grid", "Q=1"]) == 2
    out = tmp_path / "b.csv"
    assert main(["bench", "--grid", "A=1 O=1 k=1,2", "--out", str(out)]) == 0
    assert len(read_csv(out.read_text())) == 2
    assert parse_grid("A=1,2;k=4") ["A"] == [1, 2]


def test_module_entry_point(noisy_file):
    proc = subprocess.run([sys.executable, "-m", "repnet", "validate", str(noisy_file)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "OK"
    proc = subprocess.run([sys.executable, "-m", "repnet"], capture_output=True, text=True)
    assert proc.returncode == 2
