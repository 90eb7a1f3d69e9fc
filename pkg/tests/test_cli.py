from __future__ import annotations

import json
import math

import numpy as np
import pytest

from helpers import random_tree
from treecount.cli import main
from treecount.graphs import complete_digraph, directed_cycle, write_graph_text
from treecount.trees import path_tree, write_tree_text


@pytest.fixture
def k6_file(tmp_path):
    p = tmp_path / "k6.txt"
    p.write_text(write_graph_text(complete_digraph(6)))
    return str(p)


@pytest.fixture
def path5_file(tmp_path):
    p = tmp_path / "p5.txt"
    p.write_text(write_tree_text(path_tree(5)))
    return str(p)


def test_entropy_command(k6_file, tmp_path):
    out = str(tmp_path / "entropy.json")
    assert main(["entropy", k6_file, "--out", out]) == 0
    payload = json.loads(open(out).read())
    assert payload["h_bits"] == pytest.approx(6 * math.log2(5), abs=1e-6)
    assert payload["b_min"] == pytest.approx(6 / 5)


def test_malformed_input_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("digraph 2 1\n0 0\n")
    assert main(["entropy", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_missing_file_exit_2(tmp_path):
    assert main(["entropy", str(tmp_path / "nope.txt")]) == 2


def test_count_command_brute(tmp_path, path5_file):
    g = tmp_path / "k5.txt"
    g.write_text(write_graph_text(complete_digraph(5)))
    out = str(tmp_path / "count.json")
    assert main(["count", str(g), path5_file, "--out", out]) == 0
    payload = json.loads(open(out).read())
    assert payload["count"]["labelled"] == 120
    assert payload["bound_value"] == pytest.approx(6.9, abs=0.01)
    assert payload["holds"]


def test_count_oversized_tree_exit_2(tmp_path, path5_file):
    g = tmp_path / "k3.txt"
    g.write_text(write_graph_text(complete_digraph(3)))
    assert main(["count", str(g), path5_file]) == 2


def test_count_estimate_mode(tmp_path, path5_file):
    g = tmp_path / "k6.txt"
    g.write_text(write_graph_text(complete_digraph(6)))
    out = str(tmp_path / "count.json")
    code = main([
        "count", str(g), path5_file, "--mode", "estimate",
        "--samples", "50000", "--seed", "1", "--out", out,
    ])
    assert code == 0
    payload = json.loads(open(out).read())
    low, high = payload["count"]["ci"]["low"], payload["count"]["ci"]["high"]
    assert low <= 720 * 1.05 and high >= 720 * 0.9


def test_sample_command_deterministic(tmp_path, k6_file, path5_file):
    out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    args = ["sample", k6_file, path5_file, "--samples", "200", "--seed", "7"]
    assert main(args + ["--out", out1]) == 0
    assert main(args + ["--out", out2]) == 0
    assert open(out1, "rb").read() == open(out2, "rb").read()
    header = open(out1).readline().strip()
    assert header == "seed,worker,images,log_prob,self_avoiding,well_behaved"


def test_mixing_command(tmp_path, k6_file):
    out = str(tmp_path / "mixing.json")
    assert main(["mixing", k6_file, "--t-max", "40", "--out", out]) == 0
    payload = json.loads(open(out).read())
    assert payload["hypothesis_ok"]
    assert all(r["holds"] for r in payload["rows"] if r["admissible"])


def test_decompose_command(tmp_path):
    tree = tmp_path / "p16.txt"
    tree.write_text(write_tree_text(path_tree(16)))
    out = str(tmp_path / "dec.json")
    assert main(["decompose", str(tree), "--out", out]) == 0
    payload = json.loads(open(out).read())
    assert all(payload["invariants"].values())
    assert sum(p["size"] for p in payload["pieces"]) >= 16


def test_pipeline_command(tmp_path):
    g = tmp_path / "k10.txt"
    g.write_text(write_graph_text(complete_digraph(10)))
    t = tmp_path / "t9.txt"
    t.write_text(write_tree_text(random_tree(np.random.default_rng(5), 9, 3)))
    out = str(tmp_path / "trace.json")
    assert main(["pipeline", str(g), str(t), "--seed", "2", "--out", out]) == 0
    payload = json.loads(open(out).read())
    assert payload["success"]
    assert len(set(payload["mapping"].values())) == 9


def test_pipeline_low_degree_exit_1(tmp_path):
    g = tmp_path / "cycle.txt"
    g.write_text(write_graph_text(directed_cycle(6)))
    t = tmp_path / "p3.txt"
    t.write_text(write_tree_text(path_tree(3)))
    assert main(["pipeline", str(g), str(t)]) == 1


def test_verify_command_csv(tmp_path, path5_file):
    g = tmp_path / "k5.txt"
    g.write_text(write_graph_text(complete_digraph(5)))
    out = str(tmp_path / "verify.csv")
    assert main(["verify", str(g), path5_file, "--format", "csv",
                 "--out", out]) == 0
    lines = open(out).read().strip().split("\n")
    assert lines[0].startswith("n,m,h_bits")


def test_json_reports_byte_identical(tmp_path, k6_file):
    out1, out2 = str(tmp_path / "e1.json"), str(tmp_path / "e2.json")
    main(["entropy", k6_file, "--out", out1])
    main(["entropy", k6_file, "--out", out2])
    assert open(out1, "rb").read() == open(out2, "rb").read()
