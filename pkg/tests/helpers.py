"""Shared random-instance builders for the test suite."""

from __future__ import annotations

import numpy as np

from treecount.graphs import Digraph
from treecount.trees import DOWN, UP, RootedOrientedTree


def random_dense_digraph(
    rng: np.random.Generator, n: int, min_deg: int, keep_prob: float = 0.5
) -> Digraph:
    """Random digraph with min-semidegree >= min_deg, thinned from K_n."""
    arcs = {(u, v) for u in range(n) for v in range(n) if u != v}
    deg_out = {v: n - 1 for v in range(n)}
    deg_in = {v: n - 1 for v in range(n)}
    order = sorted(arcs)
    rng.shuffle(order)
    for (u, v) in order:
        if deg_out[u] > min_deg and deg_in[v] > min_deg and rng.random() < keep_prob:
            arcs.discard((u, v))
            deg_out[u] -= 1
            deg_in[v] -= 1
    return Digraph(n, arcs)


def random_tree(
    rng: np.random.Generator, n: int, max_deg: int = 16
) -> RootedOrientedTree:
    """Random recursive tree with a degree cap and random orientations."""
    parent = [-1]
    dirs: list = [None]
    deg = np.zeros(n, dtype=np.int64)
    for v in range(1, n):
        cands = np.flatnonzero(deg[:v] < max_deg - 1)
        p = int(rng.choice(cands))
        parent.append(p)
        deg[p] += 1
        deg[v] += 1
        dirs.append(DOWN if rng.random() < 0.5 else UP)
    return RootedOrientedTree(parent, dirs)
