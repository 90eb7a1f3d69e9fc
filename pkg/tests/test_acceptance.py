"""End-to-end acceptance suite.

Each test covers one numbered acceptance criterion and records a single
PASS/FAIL line that conftest echoes after the run summary, so the verdicts
are visible in plain test logs.
"""

from __future__ import annotations

import functools
import itertools
import math
import time

import numpy as np
import pytest

from helpers import random_dense_digraph, random_tree
from test_matching import projected_gradient_entropy, scaled_random_pfm
from test_trees import brute_automorphisms
from treecount.counting import (
    BoundInputs,
    count_copies_brute,
    count_hamilton_cycles,
    directed_lower_bound,
    estimate_copies,
    hamilton_cycle_experiment,
    verify_bound_experiment,
)
from treecount.entropy import (
    DiscreteDistribution,
    EventMask,
    entropy_gap_bound,
    plugin_entropy,
)
from treecount.graphs import complete_digraph, complete_graph
from treecount.matching import (
    PerfectFractionalMatching,
    fourcycle_shift,
    heavy_mass,
    matching_entropy,
    max_entropy_matching,
    max_shift,
    normality,
)
from treecount.pipeline import run_pipeline, trace_to_json, validate_embedding
from treecount.randtree import (
    DOWN,
    exact_tree_entropy,
    hr_lower_bound,
    mixing_check,
    replay_log_prob,
    sample_trees_batch,
    self_avoiding_reference_bound,
)
from treecount.trees import (
    RootedOrientedTree,
    decomposition_invariant_report,
    path_tree,
    quarter_decomposition,
    star_tree,
    tree_partition,
)


def criterion(label: str):
    """Decorator recording one PASS/FAIL line per acceptance criterion."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            import conftest

            try:
                fn(*args, **kwargs)
            except BaseException:
                conftest.ACCEPTANCE_VERDICTS.append(f"{label}: FAIL")
                print(f"{label}: FAIL")
                raise
            conftest.ACCEPTANCE_VERDICTS.append(f"{label}: PASS")
            print(f"{label}: PASS")

        return wrapper

    return deco


@criterion("criterion 01 max-entropy solver")
def test_c01_max_entropy_solver():
    start = time.perf_counter()
    x, cert = max_entropy_matching(complete_digraph(6))
    elapsed = time.perf_counter() - start
    assert matching_entropy(x) == pytest.approx(6 * math.log2(5), abs=1e-6)
    assert cert.iterations <= 1000
    assert elapsed < 1.0

    rng = np.random.default_rng(101)
    for _ in range(20):
        g = random_dense_digraph(rng, 30, min_deg=17)
        _, c = max_entropy_matching(g)
        assert c.product_residual <= 1e-8
        assert c.sum_residual <= 1e-9

    for trial in range(3):
        n = 8 + trial
        g = random_dense_digraph(rng, n, min_deg=(n + 1) // 2 + 1)
        xg, _ = max_entropy_matching(g)
        assert matching_entropy(xg) == pytest.approx(
            projected_gradient_entropy(g), abs=1e-5
        )


@criterion("criterion 02 four-cycle shifts")
def test_c02_fourcycle_shifts():
    rng = np.random.default_rng(102)
    n = 8
    g = complete_digraph(n)
    x = scaled_random_pfm(rng, g)
    done = 0
    while done < 10 ** 4:
        v, u = (int(a) for a in rng.choice(n, size=2, replace=False))
        rest = [i for i in range(n) if i not in (v, u)]
        w, z = (int(a) for a in rng.choice(rest, size=2, replace=False))
        alpha_max = max_shift(x, (v, w, u, z))
        if alpha_max <= 0:
            continue
        alpha = alpha_max * float(rng.random())
        h_before = matching_entropy(x)
        x = fourcycle_shift(x, (v, w, u, z), alpha)
        # matching property preserved exactly and entropy monotone
        assert np.abs(x.weights.sum(axis=1) - 1.0).max() <= 1e-12
        assert np.abs(x.weights.sum(axis=0) - 1.0).max() <= 1e-12
        assert matching_entropy(x) >= h_before - 1e-12
        done += 1


@criterion("criterion 03 conditioning entropy gap")
def test_c03_entropy_gap_bound():
    rng = np.random.default_rng(103)
    done = 0
    while done < 10 ** 4:
        k = int(rng.integers(2, 12))
        A = float(rng.uniform(16, 64))
        floor = 1.0 / A
        if 1 - k * floor <= 0:
            continue
        probs = floor + (1 - k * floor) * rng.dirichlet(np.ones(k))
        if probs.min() < floor:
            continue
        d = DiscreteDistribution.of(probs / probs.sum())
        order = np.argsort(probs)[::-1]
        members, mass = [], 0.0
        for i in order:
            members.append(int(i))
            mass += d.probs[i]
            if mass >= 0.5:
                break
        verdict = entropy_gap_bound(d, EventMask.of_indices(members, k), A=A)
        assert verdict.holds
        done += 1


@criterion("criterion 04 little weight above b/n")
def test_c04_little_weight():
    rng = np.random.default_rng(104)
    n, b = 30, 8.0
    cap = 4 * n / math.log2(b)
    done = 0
    while done < 10 ** 3:
        g = random_dense_digraph(rng, n, min_deg=int(rng.integers(18, 25)))
        x, _ = max_entropy_matching(g)
        if matching_entropy(x) < n * math.log2(n / 2):
            continue
        assert heavy_mass(x, b) <= cap + 1e-9
        done += 1


@criterion("criterion 05 tree decompositions")
def test_c05_tree_decompositions():
    rng = np.random.default_rng(105)
    start = time.perf_counter()
    for _ in range(10 ** 3):
        n = int(round(10 ** rng.uniform(math.log10(2), 4)))
        t = random_tree(rng, n, max_deg=16)
        n0 = int(rng.integers(n, min(n ** 4, 4 * n) + 1))
        dec = quarter_decomposition(t, n0)
        rep = decomposition_invariant_report(t, dec)
        assert all(rep.values()), (n, n0, rep)
        if n >= 3:
            floor = int(rng.integers(1, max(2, n // 3)))
            delta = t.max_degree()
            for piece in tree_partition(t, floor):
                assert floor <= piece.size <= 2 * delta * floor
    assert time.perf_counter() - start < 30.0


@criterion("criterion 06 automorphism counts")
def test_c06_automorphisms():
    parent = [-1, 0, 0, 1, 1, 2, 2]
    t_bin = RootedOrientedTree(parent, [None] + [DOWN] * 6)
    assert brute_automorphisms(t_bin, rooted=True, respect_orientation=True) == 8
    from treecount.trees import automorphism_count

    assert automorphism_count(t_bin, rooted=True) == 8

    rng = np.random.default_rng(106)
    sizes = np.arange(2, 9)
    weights = np.array([4.0, 4.0, 4.0, 4.0, 3.0, 1.0, 0.5])
    weights /= weights.sum()
    for _ in range(500):
        n = int(rng.choice(sizes, p=weights))
        t = random_tree(rng, n, max_deg=7)
        for rooted in (True, False):
            for respect in (True, False):
                assert automorphism_count(t, rooted, respect) == \
                    brute_automorphisms(t, rooted, respect)


@criterion("criterion 07 random tree entropy")
def test_c07_random_tree_entropy():
    rng = np.random.default_rng(107)
    shapes = 0
    while shapes < 50:
        n = 5 + shapes % 6
        g = complete_digraph(n)
        w = np.full((n, n), 1.0 / (n - 1))
        np.fill_diagonal(w, 0.0)
        x = PerfectFractionalMatching(g, w)
        t = random_tree(rng, int(rng.integers(2, n)), max_deg=4)
        h = exact_tree_entropy(g, x, t, 0)
        assert h == pytest.approx(t.m * math.log2(n - 1), abs=1e-9)
        assert hr_lower_bound(t.m, n, matching_entropy(x)) <= h + 1e-12
        shapes += 1

    # Monte Carlo plug-in crosscheck on one n=8 fixture
    g = random_dense_digraph(np.random.default_rng(1070), 8, min_deg=5)
    x, _ = max_entropy_matching(g)
    t = star_tree(3)
    h_exact = exact_tree_entropy(g, x, t, 0)
    # exact surprisal variance over the full outcome space
    var = 0.0
    for images in itertools.product(range(8), repeat=3):
        logp = replay_log_prob(x, t, (0,) + images)
        if logp == -math.inf:
            continue
        p = 2.0 ** logp
        var += p * (-logp - h_exact) ** 2
    n_samples = 10 ** 6
    batch = sample_trees_batch(g, x, t, n_samples, seed=7, start=0)
    h_mc = plugin_entropy(batch.images)
    sigma = math.sqrt(var / n_samples)
    bias = 8 ** 3 / (2 * n_samples * math.log(2))
    assert abs(h_mc - h_exact) <= 3 * sigma + bias


@criterion("criterion 08 self-avoidance frequency")
def test_c08_self_avoidance():
    n, m = 50, 6
    g = complete_digraph(n)
    w = np.full((n, n), 1.0 / (n - 1))
    np.fill_diagonal(w, 0.0)
    x = PerfectFractionalMatching(g, w)
    b = normality(x).b_min
    assert b == pytest.approx(50 / 49)
    t = random_tree(np.random.default_rng(108), m + 1, max_deg=4)
    n_samples = 10 ** 5
    batch = sample_trees_batch(g, x, t, n_samples, seed=8)
    freq = float(batch.self_avoiding.mean())
    bound = self_avoiding_reference_bound(m, b, n)
    sigma = math.sqrt(max(freq * (1 - freq), 1e-12) / n_samples)
    assert freq >= bound - 3 * sigma


@criterion("criterion 09 mixing bound")
def test_c09_mixing():
    rng = np.random.default_rng(109)
    g = random_dense_digraph(rng, 40, min_deg=34)
    x, _ = max_entropy_matching(g)
    rep = mixing_check(g, x, [DOWN], start=0, t_min=1, t_max=200)
    assert rep.hypothesis_ok
    assert any(row.admissible for row in rep.rows)
    assert rep.all_admissible_hold()


@criterion("criterion 10 counting")
def test_c10_counting():
    assert count_copies_brute(complete_digraph(5), path_tree(5)).labelled == 120
    assert count_hamilton_cycles(complete_graph(6)) == 60
    # the 6-cycle has the dihedral automorphism group of order 12
    assert hamilton_cycle_experiment(complete_graph(6)).aut == 12

    rng = np.random.default_rng(110)
    covered = 0
    for trial in range(10):
        g = random_dense_digraph(rng, 8, min_deg=5)
        t = random_tree(rng, 6, max_deg=3)
        brute = count_copies_brute(g, t).labelled
        rep = estimate_copies(g, x_host(g), t, samples=10 ** 6, seed=trial)
        low, high, conf = rep.ci
        assert conf == 0.95
        assert abs(rep.labelled - brute) / brute <= 0.05
        if low <= brute <= high:
            covered += 1
    assert covered >= 8


def x_host(g):
    x, _ = max_entropy_matching(g)
    return x


@criterion("criterion 11 bound sanity")
def test_c11_bound_sanity():
    for n in range(5, 9):
        exp = verify_bound_experiment(complete_digraph(n), path_tree(n))
        assert exp.count == math.factorial(n)
        assert exp.bound_value == pytest.approx(
            (n - 1) ** n * math.exp(-n), rel=1e-9
        )
        assert exp.holds and exp.note == ""
        ham = hamilton_cycle_experiment(complete_graph(n))
        assert ham.count == math.factorial(n - 1) // 2
        assert ham.bound_value == pytest.approx(
            (n - 1) ** n * math.exp(-n) / (2 * n), rel=1e-6
        )
        assert ham.holds
    # shape identity behind the directed case
    b = directed_lower_bound(BoundInputs(n=6, h=6 * math.log2(3), eps=0.0, aut=1))
    assert b.value == pytest.approx(3 ** 6 * math.e ** -6, rel=1e-9)


@criterion("criterion 12 embedding pipeline")
def test_c12_pipeline():
    rng = np.random.default_rng(112)
    g = random_dense_digraph(rng, 60, min_deg=36)
    t = random_tree(rng, 60, max_deg=4)
    start = time.perf_counter()
    trace = run_pipeline(g, t, seed=12, retry_budget=100)
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    assert trace.success and trace.spanning
    assert validate_embedding(g, t, trace.mapping)
    assert len(set(trace.mapping.values())) == 60
    for s in trace.stages:
        assert s.retries <= 100
        assert s.sum_residual <= 1e-6


@criterion("criterion 13 determinism")
def test_c13_determinism():
    rng = np.random.default_rng(113)
    g = random_dense_digraph(rng, 12, min_deg=8)
    x, _ = max_entropy_matching(g)
    t = random_tree(rng, 6, max_deg=3)

    from treecount.randtree import batch_to_csv

    csv_a = batch_to_csv(sample_trees_batch(g, x, t, 500, seed=13))
    csv_b = batch_to_csv(sample_trees_batch(g, x, t, 500, seed=13))
    assert csv_a == csv_b

    t_span = random_tree(np.random.default_rng(114), 12, max_deg=4)
    json_a = trace_to_json(run_pipeline(g, t_span, seed=14))
    json_b = trace_to_json(run_pipeline(g, t_span, seed=14))
    assert json_a == json_b

    rep_a = estimate_copies(g, x, t, samples=2000, seed=15, workers=2)
    rep_b = estimate_copies(g, x, t, samples=2000, seed=15, workers=2)
    assert rep_a == rep_b
