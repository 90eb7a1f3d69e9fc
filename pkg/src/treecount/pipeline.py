"""Iterative tree embedding: decompose, sample piece by piece, rebalance.

The driver embeds a rooted oriented tree into a dense digraph by cutting
the tree into quarter-power pieces, sampling a self-avoiding random
embedding of each piece from a maximum-entropy (or rebalanced) matching of
the shrinking host, and finally placing the reserved branch exhaustively.
Every stage's matching quality and retry count is recorded in a trace.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .errors import InputError, ProcedureError
from .graphs import Digraph, epsilon_of, induced_subgraph
from .matching import (
    PerfectFractionalMatching,
    matching_entropy,
    max_entropy_matching,
    normality,
    rebalance_after_removal,
)
from .randtree import sample_tree
from .rng import stream
from .trees import (
    AsymptoticParams,
    DOWN,
    RootedOrientedTree,
    TreePiece,
    quarter_decomposition,
    split_trunk,
)

DEFAULT_TRUNK_THRESHOLD = 4


@dataclass(frozen=True)
class StageRecord:
    index: int
    piece_size: int
    host_size: int
    matching_method: str          # "scaling" or "rebalance"
    b_normality: float
    entropy: float
    sum_residual: float           # worst row/column deviation from 1
    epsilon: float
    retries: int
    root_image: int               # original host id
    images: tuple[int, ...]       # original host ids, piece BFS order


@dataclass(frozen=True)
class PipelineTrace:
    success: bool
    mapping: dict[int, int]       # tree vertex -> host vertex
    stages: tuple[StageRecord, ...]
    notes: tuple[str, ...]
    spanning: bool
    trunk_threshold: Optional[int]


def validate_embedding(
    g: Digraph, t: RootedOrientedTree, mapping: dict[int, int]
) -> bool:
    """True iff the map is injective and sends every tree edge to a host arc."""
    if set(mapping) != set(range(t.n)):
        return False
    if len(set(mapping.values())) != t.n:
        return False
    for v in range(t.n):
        if v == t.root:
            continue
        p = t.parent[v]
        if t.edge_dir[v] == DOWN:
            ok = g.has_arc(mapping[p], mapping[v])
        else:
            ok = g.has_arc(mapping[v], mapping[p])
        if not ok:
            return False
    return True


def _find_embedding(
    g: Digraph, t: RootedOrientedTree, root_image: int
) -> Optional[list[int]]:
    """First injective embedding with the root image forced, BFS order."""
    order = t.bfs_order
    pos = {v: i for i, v in enumerate(order)}
    parents = [None] + [(pos[t.parent[v]], t.edge_dir[v]) for v in order[1:]]
    used = [False] * g.n
    image = [0] * t.n

    def extend(i: int) -> bool:
        if i == t.n:
            return True
        pi, d = parents[i]
        cands = g.out_adj[image[pi]] if d == DOWN else g.in_adj[image[pi]]
        for c in cands:
            if used[c]:
                continue
            used[c] = True
            image[i] = c
            if extend(i + 1):
                return True
            used[c] = False
        return False

    used[root_image] = True
    image[0] = root_image
    return list(image) if extend(1) else None


def run_pipeline(
    g: Digraph,
    t: RootedOrientedTree,
    params: Optional[AsymptoticParams] = None,
    seed: int = 0,
    retry_budget: int = 100,
    trunk_threshold: Optional[int] = None,
) -> PipelineTrace:
    """Embed t into g stage by stage; raises ProcedureError with the trace
    so far in its diagnostics when any stage exhausts its retry budget."""
    n = g.n
    if t.n > n:
        raise InputError(f"tree size {t.n} exceeds host size {n}")
    if epsilon_of(g).epsilon <= 0:
        raise ProcedureError(
            "host minimum semidegree is not above half the order",
            semidegree_deficit=True,
        )
    notes: list[str] = []
    if params is None:
        params = AsymptoticParams(gamma=1.0, n=n)
    rng = stream(seed)
    if t.n == 1:
        return PipelineTrace(
            success=True, mapping={t.root: 0}, stages=(),
            notes=("single-vertex tree: trivial embedding",),
            spanning=(n == 1), trunk_threshold=None,
        )
    notes.append(
        "well-behavedness relaxed to self-avoidance: the proportionality "
        "thresholds are vacuous at this instance size"
    )

    spanning = t.n == n
    branch: Optional[TreePiece] = None
    attach_vertex: Optional[int] = None
    if spanning:
        threshold = trunk_threshold or min(DEFAULT_TRUNK_THRESHOLD, t.n)
        split = split_trunk(t, threshold)
        if split.degenerate or split.trunk is None:
            # the whole tree is small enough to place exhaustively
            start = int(rng.integers(0, n))
            image = _find_embedding(g, t, start)
            if image is None:
                for alt in range(n):
                    image = _find_embedding(g, t, alt)
                    if image is not None:
                        break
            if image is None:
                raise ProcedureError("no embedding exists", stage="direct")
            mapping = {v: image[i] for i, v in enumerate(t.bfs_order)}
            return PipelineTrace(
                success=True, mapping=mapping, stages=(),
                notes=tuple(notes + ["degenerate split: direct placement"]),
                spanning=True, trunk_threshold=threshold,
            )
        trunk_piece = split.trunk
        branch = split.branch
        attach_vertex = split.attach
    else:
        threshold = None
        trunk_piece = TreePiece(tree=t, vertices=tuple(range(t.n)), root=t.root)
        if t.n > 0.9 * n:
            notes.append(
                "tree covers more than 90% of the host without being "
                "spanning; no absorption step is taken"
            )

    trunk = trunk_piece.tree
    dec = quarter_decomposition(trunk, n0=n)

    mapping: dict[int, int] = {}           # tree-vertex (original) -> host id
    used_host: set[int] = set()
    stages: list[StageRecord] = []
    cur_to_orig: list[int] = list(range(n))
    cur_g = g
    cur_x: Optional[PerfectFractionalMatching] = None
    method = "scaling"

    def to_tree_id(piece_local: int, piece: TreePiece) -> int:
        return trunk_piece.vertices[piece.vertices[piece_local]]

    for idx, piece in enumerate(dec.pieces):
        if cur_x is None:
            cur_x, _ = max_entropy_matching(cur_g)
            method = "scaling"
        if idx == 0:
            root_cur = int(rng.integers(0, cur_g.n))
        else:
            # the augmented root is the attach vertex u, always last id
            root_cur = cur_g.n - 1
        retries = 0
        real = None
        while retries < retry_budget:
            if idx == 0 and retries > 0:
                root_cur = int(rng.integers(0, cur_g.n))
            cand = sample_tree(cur_g, cur_x, piece.tree, root_cur, rng)
            retries += 1
            if cand.self_avoiding:
                real = cand
                break
        if real is None:
            raise ProcedureError(
                f"retry budget exhausted at stage {idx}",
                stage=idx, retries=retries,
                trace=PipelineTrace(
                    success=False, mapping=mapping, stages=tuple(stages),
                    notes=tuple(notes), spanning=spanning,
                    trunk_threshold=threshold,
                ),
            )
        piece_bfs = piece.tree.bfs_order
        new_images_cur = []
        for bfs_i, local_v in enumerate(piece_bfs):
            tree_id = to_tree_id(local_v, piece)
            host_orig = cur_to_orig[real.images[bfs_i]]
            if tree_id in mapping:
                # overlap vertex: the forced root must agree with its image
                if mapping[tree_id] != host_orig:
                    raise ProcedureError(
                        "anchor image mismatch", stage=idx, vertex=tree_id
                    )
                continue
            mapping[tree_id] = host_orig
            used_host.add(host_orig)
            new_images_cur.append(real.images[bfs_i])
        stages.append(StageRecord(
            index=idx,
            piece_size=piece.size,
            host_size=cur_g.n,
            matching_method=method,
            b_normality=normality(cur_x).b_min,
            entropy=matching_entropy(cur_x),
            sum_residual=float(max(
                abs(cur_x.weights.sum(axis=1) - 1.0).max(),
                abs(cur_x.weights.sum(axis=0) - 1.0).max(),
            )),
            epsilon=epsilon_of(cur_g).epsilon_float,
            retries=retries,
            root_image=cur_to_orig[real.images[0]],
            images=tuple(cur_to_orig[i] for i in real.images),
        ))
        if idx + 1 >= len(dec.pieces):
            break
        # prepare the next host: drop every used vertex, re-attach the next
        # anchor's image as a fresh vertex with its surviving neighborhoods
        next_piece = dec.pieces[idx + 1]
        anchor_tree_id = to_tree_id(next_piece.tree.root, next_piece)
        anchor_orig = mapping[anchor_tree_id]
        removed_cur = sorted(
            i for i, orig in enumerate(cur_to_orig) if orig in used_host
        )
        survivors = [
            orig for i, orig in enumerate(cur_to_orig) if orig not in used_host
        ]
        surviving_set = set(survivors)
        attach_out = [v for v in g.out_adj[anchor_orig] if v in surviving_set]
        attach_in = [v for v in g.in_adj[anchor_orig] if v in surviving_set]
        if not attach_out or not attach_in:
            raise ProcedureError(
                "anchor lost all surviving neighbors on one side",
                stage=idx, anchor=anchor_orig,
            )
        orig_to_cur = {orig: i for i, orig in enumerate(cur_to_orig)}
        try:
            res = rebalance_after_removal(
                cur_x,
                removed_cur,
                attach_out=[orig_to_cur[v] for v in attach_out],
                attach_in=[orig_to_cur[v] for v in attach_in],
            )
            cur_g = res.matching.host
            cur_x = res.matching
            method = "rebalance"
        except ProcedureError:
            arcs = [
                (u, v) for (u, v) in g.edges
                if u in surviving_set and v in surviving_set
            ]
            relabel = {orig: i for i, orig in enumerate(survivors)}
            u_id = len(survivors)
            host_arcs = [(relabel[u], relabel[v]) for u, v in arcs]
            host_arcs += [(u_id, relabel[v]) for v in attach_out]
            host_arcs += [(relabel[v], u_id) for v in attach_in]
            cur_g = Digraph(len(survivors) + 1, host_arcs)
            cur_x = None
            method = "scaling"
        cur_to_orig = survivors + [anchor_orig]

    if spanning and branch is not None:
        leftover = [v for v in range(n) if v not in used_host]
        attach_img = mapping[attach_vertex]
        sub_verts = leftover + [attach_img]
        sub, relabel = induced_subgraph(g, sub_verts)
        # root the completion at the attach image, branch hanging below it
        b_tree = branch.tree
        aug_parent = [-1] + [
            (b_tree.parent[v] + 1 if v != b_tree.root else 0)
            for v in range(b_tree.n)
        ]
        aug_dir = [None] + [
            (b_tree.edge_dir[v] if v != b_tree.root
             else t.edge_dir[branch.root])
            for v in range(b_tree.n)
        ]
        aug = RootedOrientedTree(aug_parent, aug_dir)
        image = _find_embedding(sub, aug, relabel[attach_img])
        if image is None:
            raise ProcedureError(
                "no completion embedding for the reserved branch",
                trace=PipelineTrace(
                    success=False, mapping=mapping, stages=tuple(stages),
                    notes=tuple(notes), spanning=True,
                    trunk_threshold=threshold,
                ),
            )
        inv = {new: orig for orig, new in relabel.items()}
        for bfs_i, aug_v in enumerate(aug.bfs_order):
            if aug_v == 0:
                continue
            tree_id = branch.vertices[aug_v - 1]
            mapping[tree_id] = inv[image[bfs_i]]
    if not validate_embedding(g, t, mapping):
        raise ProcedureError(
            "assembled map failed replay validation",
            trace=PipelineTrace(
                success=False, mapping=mapping, stages=tuple(stages),
                notes=tuple(notes), spanning=spanning,
                trunk_threshold=threshold,
            ),
        )
    return PipelineTrace(
        success=True, mapping=mapping, stages=tuple(stages),
        notes=tuple(notes), spanning=spanning, trunk_threshold=threshold,
    )


def trace_to_json(trace: PipelineTrace) -> str:
    payload = {
        "success": trace.success,
        "spanning": trace.spanning,
        "trunk_threshold": trace.trunk_threshold,
        "notes": list(trace.notes),
        "mapping": {str(k): v for k, v in sorted(trace.mapping.items())},
        "stages": [
            {
                "index": s.index,
                "piece_size": s.piece_size,
                "host_size": s.host_size,
                "matching_method": s.matching_method,
                "b_normality": s.b_normality,
                "entropy": s.entropy,
                "sum_residual": s.sum_residual,
                "epsilon": s.epsilon,
                "retries": s.retries,
                "root_image": s.root_image,
                "images": list(s.images),
            }
            for s in trace.stages
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
