"""Command-line front end.

Each subcommand reads text-format graphs/trees, runs one experiment, writes
a single JSON or CSV artifact, and prints a one-line summary.  Exit codes:
0 success, 1 procedure failure (diagnostics included), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .counting import (
    BoundInputs,
    count_copies_brute,
    count_report_to_dict,
    directed_lower_bound,
    estimate_copies,
    experiments_to_csv,
    verify_bound_experiment,
)
from .errors import InputError, ProcedureError
from .graphs import Digraph, Graph, double_orient, parse_graph_text
from .matching import matching_entropy, max_entropy_matching, normality
from .pipeline import run_pipeline, trace_to_json
from .randtree import batch_to_csv, mixing_check, sample_trees_batch
from .trees import (
    DOWN,
    automorphism_count,
    decomposition_invariant_report,
    parse_tree_text,
    quarter_decomposition,
)


def _read_graph(path: str) -> Digraph:
    g = parse_graph_text(Path(path).read_text())
    if isinstance(g, Graph):
        return double_orient(g)
    return g


def _read_tree(path: str):
    return parse_tree_text(Path(path).read_text())


def _emit(args, payload: str, default_name: str) -> None:
    out = args.out or default_name
    Path(out).write_text(payload)
    print(f"wrote {out}")


def _json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def cmd_entropy(args) -> int:
    g = _read_graph(args.graph)
    x, cert = max_entropy_matching(g, tol=args.tol)
    rep = normality(x)
    payload = _json({
        "n": g.n,
        "m": g.m,
        "h_bits": matching_entropy(x),
        "b_min": rep.b_min,
        "sum_residual": cert.sum_residual,
        "product_residual": cert.product_residual,
        "iterations": cert.iterations,
    })
    _emit(args, payload, "entropy.json")
    return 0


def cmd_count(args) -> int:
    g = _read_graph(args.graph)
    t = _read_tree(args.tree)
    if args.mode == "brute":
        rep = count_copies_brute(g, t)
    else:
        x, _ = max_entropy_matching(g, tol=args.tol)
        rep = estimate_copies(
            g, x, t, samples=args.samples, seed=args.seed, workers=args.workers
        )
    h = matching_entropy(max_entropy_matching(g, tol=args.tol)[0])
    aut = automorphism_count(t, rooted=False, respect_orientation=True)
    bound = directed_lower_bound(
        BoundInputs(n=g.n, h=h, eps=args.eps, aut=aut)
    )
    payload = _json({
        "count": count_report_to_dict(rep),
        "h_bits": h,
        "aut": aut,
        "bound_log2": bound.log2,
        "bound_value": bound.value,
        "holds": (rep.unlabelled or 0) >= bound.value,
    })
    _emit(args, payload, "count.json")
    return 0


def cmd_sample(args) -> int:
    g = _read_graph(args.graph)
    t = _read_tree(args.tree)
    x, _ = max_entropy_matching(g, tol=args.tol)
    per = [args.samples // args.workers] * args.workers
    for i in range(args.samples % args.workers):
        per[i] += 1
    chunks = []
    for w, k in enumerate(per):
        if k == 0:
            continue
        batch = sample_trees_batch(
            g, x, t, samples=k, seed=args.seed, worker=w, start=args.start
        )
        text = batch_to_csv(batch)
        chunks.append(text if not chunks else text.split("\n", 1)[1])
    _emit(args, "".join(chunks), "samples.csv")
    return 0


def cmd_mixing(args) -> int:
    g = _read_graph(args.graph)
    x, _ = max_entropy_matching(g, tol=args.tol)
    pattern = [DOWN]
    rep = mixing_check(g, x, pattern, start=0, t_min=args.t_min, t_max=args.t_max)
    payload = _json({
        "eps": rep.eps,
        "b": rep.b,
        "threshold": rep.threshold,
        "hypothesis_ok": rep.hypothesis_ok,
        "rows": [
            {
                "t": r.t,
                "deviation": r.deviation,
                "bound": r.bound,
                "admissible": r.admissible,
                "holds": r.holds,
            }
            for r in rep.rows
        ],
    })
    _emit(args, payload, "mixing.json")
    return 0


def cmd_decompose(args) -> int:
    t = _read_tree(args.tree)
    n0 = args.n0 if args.n0 is not None else t.n
    dec = quarter_decomposition(t, n0)
    inv = decomposition_invariant_report(t, dec)
    payload = _json({
        "n": t.n,
        "n0": dec.n0,
        "delta": dec.delta,
        "residuals": list(dec.residuals),
        "invariants": inv,
        "pieces": [
            {
                "root": p.root,
                "size": p.size,
                "vertices": list(p.vertices),
                "overlap": list(dec.overlaps[i]) if dec.overlaps[i] else None,
            }
            for i, p in enumerate(dec.pieces)
        ],
    })
    _emit(args, payload, "decomposition.json")
    return 0


def cmd_pipeline(args) -> int:
    g = _read_graph(args.graph)
    t = _read_tree(args.tree)
    trace = run_pipeline(
        g, t, seed=args.seed, retry_budget=args.retries,
        trunk_threshold=args.threshold,
    )
    _emit(args, trace_to_json(trace), "pipeline.json")
    return 0 if trace.success else 1


def cmd_verify(args) -> int:
    g = _read_graph(args.graph)
    t = _read_tree(args.tree)
    exp = verify_bound_experiment(g, t, eps=args.eps)
    if args.format == "csv":
        _emit(args, experiments_to_csv([exp]), "verify.csv")
    else:
        _emit(args, _json({
            "n": exp.n, "m": exp.m_edges, "h_bits": exp.h_bits,
            "aut": exp.aut, "count": exp.count,
            "bound_log2": exp.bound_log2, "ratio_log2": exp.ratio_log2,
            "holds": exp.holds, "note": exp.note,
        }), "verify.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treecount",
        description="entropy, sampling, and counting experiments for "
                    "tree embeddings in dense digraphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, graph=True, tree=False):
        if graph:
            p.add_argument("graph", help="edge-list file")
        if tree:
            p.add_argument("tree", help="tree file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=10000)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--eps", type=float, default=0.0)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("entropy", help="max-entropy matching of a graph")
    common(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("count", help="count copies of a tree")
    common(p, tree=True)
    p.add_argument("--mode", choices=("brute", "estimate"), default="brute")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("sample", help="sample random tree embeddings")
    common(p, tree=True)
    p.add_argument("--start", type=int, default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("mixing", help="walk-marginal mixing report")
    common(p)
    p.add_argument("--t-min", type=int, default=1)
    p.add_argument("--t-max", type=int, default=200)
    p.set_defaults(func=cmd_mixing)

    p = sub.add_parser("decompose", help="quarter-power tree decomposition")
    p.add_argument("tree", help="tree file")
    p.add_argument("--n0", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("pipeline", help="iterative tree embedding")
    common(p, tree=True)
    p.add_argument("--retries", type=int, default=100)
    p.add_argument("--threshold", type=int, default=None)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("verify", help="copy count against the entropy bound")
    common(p, tree=True)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ProcedureError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        trace = exc.diagnostics.get("trace")
        if trace is not None and getattr(args, "out", None):
            Path(args.out).write_text(trace_to_json(trace))
        return 1


if __name__ == "__main__":
    sys.exit(main())
