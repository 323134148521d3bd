"""Spanner constructions on weighted graphs.

The subsetwise construction reduces a terminal spanner problem to a
spanner of the terminals' metric closure and then maps the result back
through exact shortest paths. All constructions are deterministic:
ties in edge order and in shortest paths are broken canonically.
"""

from __future__ import annotations

from typing import Iterable

from .graph import (
    EPS,
    INF,
    WeightedGraph,
    _dijkstra,
    normalize_pair,
    shortest_path,
    single_source_distances,
)


def greedy_spanner(g: WeightedGraph, r: float) -> frozenset[tuple[int, int]]:
    """Greedy r-spanner edge set of g.

    Edges are scanned in nondecreasing weight order (ties by canonical
    pair order) and kept iff the distance between their endpoints in the
    partial spanner still exceeds r times the edge weight. The result
    satisfies d_H(u, v) <= r * w(u, v) for every edge, hence
    d_H(u, v) <= r * d_G(u, v) for every pair.
    """
    if r < 1:
        raise ValueError(f"stretch factor must be at least 1, got {r}")
    ordered = sorted(g.edge_items(), key=lambda item: (item[2], item[0], item[1]))
    kept: list[tuple[int, int]] = []
    adj: list[list[tuple[int, float]]] = [[] for _ in range(g.n)]
    for u, v, w in ordered:
        # Fresh single-source search per edge against the current spanner.
        dist = _dijkstra(adj, g.n, u, target=v)
        if dist[v] > r * w + EPS:
            kept.append((u, v))
            adj[u].append((v, w))
            adj[v].append((u, w))
    return frozenset(kept)


def path_union_preserver(
    g: WeightedGraph, pairs: Iterable[tuple[int, int]]
) -> frozenset[tuple[int, int]]:
    """Union of canonical shortest paths over the given pairs.

    The returned edge set preserves the g-distance of every listed pair
    exactly. Paths come from :func:`shortest_path`, so equal-weight ties
    resolve to the lexicographically smallest vertex sequence and the
    union stays subpath consistent.
    """
    normalized = sorted({normalize_pair(u, v) for u, v in pairs})
    edges: set[tuple[int, int]] = set()
    for u, v in normalized:
        edges.update(shortest_path(g, u, v).edges())
    return frozenset(edges)


def terminal_complete_graph(g: WeightedGraph, terminals: Iterable[int]) -> WeightedGraph:
    """Metric closure over the terminal set.

    Vertex i of the result corresponds to ``sorted(terminals)[i]`` and
    each edge weight is the g-distance between the matching terminals.
    Disconnected terminals are an error.
    """
    ts = sorted(set(terminals))
    if len(ts) < 2:
        raise ValueError("need at least two terminals")
    if not all(0 <= v < g.n for v in ts):
        raise ValueError("terminal out of range")
    edges = []
    for i, u in enumerate(ts):
        dist = single_source_distances(g, u)
        for j in range(i + 1, len(ts)):
            d = dist[ts[j]]
            if d == INF:
                raise ValueError(f"terminals {u} and {ts[j]} are disconnected")
            edges.append((i, j, d))
    return WeightedGraph(len(ts), edges)


def subsetwise_spanner(
    g: WeightedGraph, terminals: Iterable[int], t: float
) -> frozenset[tuple[int, int]]:
    """Heuristic t-spanner of g over all pairs of the terminal set.

    Builds the terminal metric closure, takes its greedy t-spanner, and
    returns the union of exact shortest paths realizing the surviving
    closure edges. For terminal pairs the stretch bound t is inherited
    from the closure spanner because every closure edge is realized at
    its exact length.
    """
    ts = sorted(set(terminals))
    closure = terminal_complete_graph(g, ts)
    closure_edges = greedy_spanner(closure, t)
    realized_pairs = [(ts[i], ts[j]) for i, j in closure_edges]
    return path_union_preserver(g, realized_pairs)
