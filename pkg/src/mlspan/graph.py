"""Weighted undirected graphs and shortest-path primitives.

Vertices are dense integer ids 0..n-1. Edges are unordered pairs with
strictly positive weights; parallel edges and self loops are rejected.
All distance comparisons in this package use an absolute tolerance of
``EPS`` so that instances with decimal weights behave predictably.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Iterator

EPS = 1e-9

INF = float("inf")


class DisconnectedPairError(ValueError):
    """Raised when a required vertex pair has no connecting path."""


def normalize_pair(u: int, v: int) -> tuple[int, int]:
    """Return the unordered pair (u, v) in canonical (min, max) form."""
    if u == v:
        raise ValueError(f"pair endpoints must differ, got ({u}, {v})")
    return (u, v) if u < v else (v, u)


class WeightedGraph:
    """Immutable undirected graph with positive edge weights.

    Edges are stored under canonical (min, max) keys. The adjacency
    structure is built once and reused by every shortest-path query.
    """

    __slots__ = ("n", "_weights", "_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int, float]]):
        if n <= 0:
            raise ValueError(f"vertex count must be positive, got {n}")
        self.n = n
        weights: dict[tuple[int, int], float] = {}
        for u, v, w in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            key = normalize_pair(u, v)
            if key in weights:
                raise ValueError(f"duplicate edge {key}")
            w = float(w)
            if not w > 0:
                raise ValueError(f"edge {key} must have positive weight, got {w}")
            weights[key] = w
        self._weights = dict(sorted(weights.items()))
        adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for (u, v), w in self._weights.items():
            adj[u].append((v, w))
            adj[v].append((u, w))
        self._adj = [tuple(sorted(neighbors)) for neighbors in adj]

    @property
    def m(self) -> int:
        return len(self._weights)

    def edges(self) -> tuple[tuple[int, int], ...]:
        """All edges as canonical pairs in sorted order."""
        return tuple(self._weights)

    def edge_items(self) -> tuple[tuple[int, int, float], ...]:
        return tuple((u, v, w) for (u, v), w in self._weights.items())

    def has_edge(self, u: int, v: int) -> bool:
        return normalize_pair(u, v) in self._weights

    def weight(self, u: int, v: int) -> float:
        key = normalize_pair(u, v)
        try:
            return self._weights[key]
        except KeyError:
            raise KeyError(f"no edge {key}") from None

    def weight_of(self, key: tuple[int, int]) -> float:
        return self._weights[key]

    def neighbors(self, v: int) -> tuple[tuple[int, float], ...]:
        return self._adj[v]

    def total_weight(self) -> float:
        return sum(self._weights.values())

    def subgraph(self, keep: Iterable[tuple[int, int]]) -> WeightedGraph:
        """Subgraph on the same vertex set restricted to the given edges."""
        items = []
        for u, v in keep:
            key = normalize_pair(u, v)
            if key not in self._weights:
                raise ValueError(f"edge {key} is not in the graph")
            items.append((key[0], key[1], self._weights[key]))
        return WeightedGraph(self.n, items)

    def without_edge(self, u: int, v: int) -> WeightedGraph:
        key = normalize_pair(u, v)
        if key not in self._weights:
            raise ValueError(f"edge {key} is not in the graph")
        return WeightedGraph(
            self.n,
            ((a, b, w) for (a, b), w in self._weights.items() if (a, b) != key),
        )

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self._weights)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self.n == other.n and self._weights == other._weights

    def __hash__(self) -> int:
        return hash((self.n, tuple(self._weights.items())))

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, m={self.m})"


def _dijkstra(
    adj: list[tuple[tuple[int, float], ...]] | list[list[tuple[int, float]]],
    n: int,
    source: int,
    target: int | None = None,
) -> list[float]:
    dist = [INF] * n
    dist[source] = 0.0
    heap: list[tuple[float, int]] = [(0.0, source)]
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist[v]:
            continue
        if target is not None and v == target:
            break
        for w, weight in adj[v]:
            nd = d + weight
            if nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return dist


def single_source_distances(g: WeightedGraph, source: int) -> list[float]:
    """Distances from ``source`` to every vertex; ``inf`` when unreachable."""
    if not 0 <= source < g.n:
        raise ValueError(f"source {source} out of range for n={g.n}")
    return _dijkstra(g._adj, g.n, source)


def all_pairs_distances(g: WeightedGraph) -> list[list[float]]:
    """Full distance matrix as a list of per-source rows."""
    return [_dijkstra(g._adj, g.n, s) for s in range(g.n)]


@dataclass(frozen=True)
class Path:
    """A walk returned by :func:`shortest_path`; always a simple path."""

    vertices: tuple[int, ...]
    total_weight: float

    def edges(self) -> tuple[tuple[int, int], ...]:
        vs = self.vertices
        return tuple(normalize_pair(vs[i], vs[i + 1]) for i in range(len(vs) - 1))


def shortest_path(g: WeightedGraph, u: int, v: int) -> Path:
    """Minimum-weight u-v path, lexicographically smallest among ties.

    Among all minimum-weight paths the one whose vertex sequence is
    lexicographically smallest is returned. This choice is consistent:
    prefixes of returned paths are themselves returned paths, so unions
    of these paths over a set of pairs form subpath-closed subgraphs.
    """
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise ValueError(f"pair ({u}, {v}) out of range for n={g.n}")
    if u == v:
        return Path((u,), 0.0)
    dist_to_target = _dijkstra(g._adj, g.n, v)
    total = dist_to_target[u]
    if total == INF:
        raise DisconnectedPairError(f"vertices {u} and {v} are disconnected")
    sequence = [u]
    acc = 0.0
    current = u
    while current != v:
        # Pick the smallest neighbor that still completes a shortest path.
        chosen = None
        for w, weight in g._adj[current]:
            if acc + weight + dist_to_target[w] <= total + EPS:
                chosen = (w, weight)
                break
        if chosen is None:  # unreachable for positive weights
            raise RuntimeError(f"shortest path reconstruction failed at {current}")
        current = chosen[0]
        acc += chosen[1]
        sequence.append(current)
    return Path(tuple(sequence), acc)


@dataclass(frozen=True)
class StretchViolation:
    u: int
    v: int
    subgraph_distance: float
    allowed: float


def stretch_violations(
    g: WeightedGraph,
    subgraph_edges: Iterable[tuple[int, int]],
    pairs: Iterable[tuple[int, int]],
    t: float,
) -> list[StretchViolation]:
    """Pairs whose subgraph distance exceeds ``t`` times their distance in g.

    Disconnected pairs are reported with an infinite subgraph distance.
    A subgraph edge absent from g is an argument error.
    """
    if t < 1:
        raise ValueError(f"stretch factor must be at least 1, got {t}")
    h = g.subgraph(subgraph_edges)
    wanted: dict[int, list[int]] = {}
    for u, v in (normalize_pair(a, b) for a, b in pairs):
        wanted.setdefault(u, []).append(v)
    violations = []
    for u in sorted(wanted):
        base = _dijkstra(g._adj, g.n, u)
        got = _dijkstra(h._adj, h.n, u)
        for v in sorted(set(wanted[u])):
            allowed = t * base[v]
            if got[v] > allowed + EPS:
                violations.append(StretchViolation(u, v, got[v], allowed))
    return violations


def connected_over(g: WeightedGraph, vertices: Iterable[int]) -> bool:
    """Whether all given vertices lie in one connected component."""
    vs = sorted(set(vertices))
    if len(vs) <= 1:
        return True
    dist = _dijkstra(g._adj, g.n, vs[0])
    return all(dist[v] < INF for v in vs[1:])
