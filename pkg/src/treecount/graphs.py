"""Immutable directed and undirected graph types with semidegree metadata.

Vertices are dense integer ids 0..n-1.  Neighbor lists are stored sorted so
that iteration order is deterministic, which keeps all downstream sampling
reproducible.  Self-loops are rejected at construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError, ParseError


class Digraph:
    """A simple digraph: ordered pairs (u, v) with u != v, no parallel arcs."""

    __slots__ = ("n", "edges", "out_adj", "in_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise InputError("vertex count must be nonnegative")
        edge_set = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"arc ({u},{v}) out of range for n={n}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            edge_set.add((u, v))
        out_lists: list[list[int]] = [[] for _ in range(n)]
        in_lists: list[list[int]] = [[] for _ in range(n)]
        for u, v in edge_set:
            out_lists[u].append(v)
            in_lists[v].append(u)
        self.n = n
        self.edges = frozenset(edge_set)
        self.out_adj = tuple(tuple(sorted(a)) for a in out_lists)
        self.in_adj = tuple(tuple(sorted(a)) for a in in_lists)

    def deg_out(self, v: int) -> int:
        return len(self.out_adj[v])

    def deg_in(self, v: int) -> int:
        return len(self.in_adj[v])

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    @property
    def m(self) -> int:
        return len(self.edges)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Digraph)
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, m={self.m})"


class Graph:
    """A simple undirected graph on vertices 0..n-1."""

    __slots__ = ("n", "edges", "adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise InputError("vertex count must be nonnegative")
        edge_set = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            edge_set.add((min(u, v), max(u, v)))
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edge_set:
            adj[u].append(v)
            adj[v].append(u)
        self.n = n
        self.edges = frozenset(edge_set)
        self.adj = tuple(tuple(sorted(a)) for a in adj)

    def deg(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def m(self) -> int:
        return len(self.edges)

    def min_degree(self) -> int:
        if self.n == 0:
            return 0
        return min(len(a) for a in self.adj)

    def max_degree(self) -> int:
        if self.n == 0:
            return 0
        return max(len(a) for a in self.adj)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class BipartiteDouble:
    """The balanced bipartite graph with sides v+ and v- and one edge per arc."""

    n: int
    edges: frozenset  # pairs (i, j) meaning v_i^+ v_j^-

    def deg_plus(self, i: int) -> int:
        return sum(1 for e in self.edges if e[0] == i)

    def deg_minus(self, j: int) -> int:
        return sum(1 for e in self.edges if e[1] == j)


@dataclass(frozen=True)
class EpsilonWitness:
    """The largest epsilon with min-semidegree >= (1/2 + epsilon) * n."""

    n: int
    epsilon: Fraction

    @property
    def epsilon_float(self) -> float:
        return float(self.epsilon)


def min_semidegree(g: Digraph) -> int:
    """min over v of min(deg+(v), deg-(v)); 0 for the empty graph."""
    if g.n == 0:
        return 0
    return min(min(g.deg_out(v), g.deg_in(v)) for v in range(g.n))


def to_bipartite(g: Digraph) -> BipartiteDouble:
    return BipartiteDouble(n=g.n, edges=frozenset(g.edges))


def double_orient(g: Graph) -> Digraph:
    """Replace every undirected edge by a pair of antiparallel arcs."""
    arcs = []
    for u, v in g.edges:
        arcs.append((u, v))
        arcs.append((v, u))
    return Digraph(g.n, arcs)


def remove_vertices(g: Digraph, s: Iterable[int]) -> tuple[Digraph, dict[int, int]]:
    """Induced subgraph on V minus s, plus the old->new id map."""
    s = set(s)
    for v in s:
        if not (0 <= v < g.n):
            raise InputError(f"unknown vertex id {v}")
    keep = [v for v in range(g.n) if v not in s]
    relabel = {old: new for new, old in enumerate(keep)}
    arcs = [
        (relabel[u], relabel[v])
        for (u, v) in g.edges
        if u not in s and v not in s
    ]
    return Digraph(len(keep), arcs), relabel


def induced_subgraph(g: Digraph, keep: Sequence[int]) -> tuple[Digraph, dict[int, int]]:
    """Induced subgraph on the given vertex sequence (order defines new ids)."""
    keep = list(keep)
    if len(set(keep)) != len(keep):
        raise InputError("duplicate vertex in induced set")
    for v in keep:
        if not (0 <= v < g.n):
            raise InputError(f"unknown vertex id {v}")
    relabel = {old: new for new, old in enumerate(keep)}
    arcs = [
        (relabel[u], relabel[v])
        for (u, v) in g.edges
        if u in relabel and v in relabel
    ]
    return Digraph(len(keep), arcs), relabel


def epsilon_of(g: Digraph) -> EpsilonWitness:
    if g.n == 0:
        raise InputError("epsilon undefined for the empty graph")
    eps = Fraction(min_semidegree(g), g.n) - Fraction(1, 2)
    return EpsilonWitness(n=g.n, epsilon=eps)


def complete_digraph(n: int) -> Digraph:
    """K_n with both orientations of every edge."""
    return Digraph(n, [(u, v) for u in range(n) for v in range(n) if u != v])


def directed_cycle(n: int) -> Digraph:
    return Digraph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


# ---------------------------------------------------------------------------
# edge-list text format:
#   first line: "digraph <n> <m>" or "graph <n> <m>"
#   then m lines "<u> <v>" with 0-based ids
# ---------------------------------------------------------------------------

def parse_graph_text(text: str) -> Digraph | Graph:
    lines = text.splitlines()
    if not lines:
        raise ParseError(1, "empty input")
    head = lines[0].split()
    if len(head) != 3 or head[0] not in ("digraph", "graph"):
        raise ParseError(1, "expected header 'digraph <n> <m>' or 'graph <n> <m>'")
    try:
        n, m = int(head[1]), int(head[2])
    except ValueError:
        raise ParseError(1, "non-integer vertex/edge count") from None
    if n < 0 or m < 0:
        raise ParseError(1, "negative vertex/edge count")
    directed = head[0] == "digraph"
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != m:
        raise ParseError(len(lines), f"expected {m} edge lines, found {len(body)}")
    seen = set()
    edges = []
    for idx, ln in enumerate(body, start=2):
        parts = ln.split()
        if len(parts) != 2:
            raise ParseError(idx, "expected '<u> <v>'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(idx, "non-integer vertex id") from None
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(idx, f"vertex id out of range 0..{n - 1}")
        if u == v:
            raise ParseError(idx, "self-loop")
        key = (u, v) if directed else (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(idx, f"duplicate edge {u} {v}")
        seen.add(key)
        edges.append((u, v))
    return Digraph(n, edges) if directed else Graph(n, edges)


def write_graph_text(g: Digraph | Graph) -> str:
    if isinstance(g, Digraph):
        head = f"digraph {g.n} {g.m}"
    else:
        head = f"graph {g.n} {g.m}"
    lines = [head]
    for u, v in sorted(g.edges):
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"
