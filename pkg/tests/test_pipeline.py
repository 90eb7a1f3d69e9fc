from __future__ import annotations

import numpy as np
import pytest

from helpers import random_dense_digraph, random_tree
from treecount.errors import InputError, ProcedureError
from treecount.graphs import complete_digraph, directed_cycle
from treecount.pipeline import run_pipeline, trace_to_json, validate_embedding
from treecount.trees import RootedOrientedTree, path_tree


def test_single_vertex_trivial():
    t = RootedOrientedTree([-1], [None])
    trace = run_pipeline(complete_digraph(5), t, seed=0)
    assert trace.success and trace.stages == ()
    assert validate_embedding(complete_digraph(5), t, trace.mapping)


def test_low_semidegree_rejected():
    with pytest.raises(ProcedureError):
        run_pipeline(directed_cycle(6), path_tree(3), seed=0)


def test_oversized_tree_rejected():
    with pytest.raises(InputError):
        run_pipeline(complete_digraph(3), path_tree(4), seed=0)


def test_spanning_k10():
    rng = np.random.default_rng(50)
    g = complete_digraph(10)
    t = random_tree(rng, 10, max_deg=4)
    trace = run_pipeline(g, t, seed=3)
    assert trace.success and trace.spanning
    assert validate_embedding(g, t, trace.mapping)


def test_nonspanning_embedding():
    rng = np.random.default_rng(51)
    g = random_dense_digraph(rng, 24, min_deg=15)
    t = random_tree(rng, 12, max_deg=3)
    trace = run_pipeline(g, t, seed=4)
    assert trace.success and not trace.spanning
    assert validate_embedding(g, t, trace.mapping)
    assert all(s.retries <= 100 for s in trace.stages)


def test_intermediate_matchings_reported():
    rng = np.random.default_rng(52)
    g = random_dense_digraph(rng, 20, min_deg=13)
    t = random_tree(rng, 20, max_deg=3)
    trace = run_pipeline(g, t, seed=5)
    assert trace.success
    for s in trace.stages:
        assert s.b_normality >= 1.0
        assert s.entropy >= 0.0
        assert s.matching_method in ("scaling", "rebalance")


def test_trace_json_deterministic():
    rng = np.random.default_rng(53)
    g = random_dense_digraph(rng, 16, min_deg=10)
    t = random_tree(np.random.default_rng(99), 16, max_deg=3)
    a = trace_to_json(run_pipeline(g, t, seed=8))
    b = trace_to_json(run_pipeline(g, t, seed=8))
    assert a == b
    c = trace_to_json(run_pipeline(g, t, seed=9))
    assert isinstance(c, str)


def test_validate_embedding_rejects_bad_maps():
    g = complete_digraph(4)
    t = path_tree(3)
    assert not validate_embedding(g, t, {0: 0, 1: 1})          # missing vertex
    assert not validate_embedding(g, t, {0: 0, 1: 0, 2: 1})    # not injective
    assert validate_embedding(g, t, {0: 0, 1: 1, 2: 2})
    c = directed_cycle(4)
    assert not validate_embedding(c, path_tree(3, dirs=["up", "up"]),
                                  {0: 0, 1: 1, 2: 2})
