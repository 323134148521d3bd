"""Seeded random instance generation.

Randomness discipline: every generator derives independent substreams
from the user-visible 64-bit seed via ``SeedSequence(seed,
spawn_key=(stream,))`` with stream 0 for topology, 1 for weights, and 2
for terminal sampling. Changing the number of levels therefore never
perturbs the graph, and weight draws never depend on how many edges the
topology pass produced before a given pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from numpy.random import Generator, PCG64, SeedSequence

from .graph import WeightedGraph, connected_over
from .multilevel import MLGSInstance

_TOPOLOGY_STREAM = 0
_WEIGHT_STREAM = 1
_TERMINAL_STREAM = 2

_MAX_CONNECTIVITY_ATTEMPTS = 100

_FAMILIES = ("erdos_renyi", "watts_strogatz")


def _stream(seed: int, stream: int) -> Generator:
    return Generator(PCG64(SeedSequence(seed, spawn_key=(stream,))))


def er_edge_probability(n: int, eps: float) -> float:
    """Connectivity-threshold edge probability (1+eps)·ln(n)/n, capped at 1."""
    return min(1.0, (1.0 + eps) * math.log(n) / n)


def _draw_weights(
    edges: list[tuple[int, int]], seed: int
) -> list[tuple[int, int, float]]:
    rng = _stream(seed, _WEIGHT_STREAM)
    weights = rng.integers(1, 11, size=len(edges))
    return [(u, v, float(w)) for (u, v), w in zip(sorted(edges), weights)]


def erdos_renyi(n: int, eps: float, seed: int) -> WeightedGraph:
    """G(n, p) at p = (1+eps)·ln(n)/n with integer weights from 1 to 10.

    Pairs are scanned in lexicographic order, one uniform draw each, so
    the topology is a pure function of (n, eps, seed). The result may be
    disconnected; callers building instances handle retries.
    """
    if n < 2:
        raise ValueError("need at least 2 vertices")
    if eps <= 0:
        raise ValueError("eps must be positive")
    p = er_edge_probability(n, eps)
    rng = _stream(seed, _TOPOLOGY_STREAM)
    draws = rng.random(n * (n - 1) // 2)
    edges = []
    idx = 0
    for u in range(n):
        for v in range(u + 1, n):
            if draws[idx] < p:
                edges.append((u, v))
            idx += 1
    return WeightedGraph(n, _draw_weights(edges, seed))


def watts_strogatz(n: int, k: int, beta: float, seed: int) -> WeightedGraph:
    """Ring lattice of degree k with each edge rewired with probability beta.

    The lattice joins every vertex to its k/2 nearest neighbors on each
    side. Edges are scanned in (vertex, offset) order; a rewire keeps
    the near endpoint and moves the far endpoint to a uniform choice
    among non-adjacent vertices, so no self-loops or duplicate edges
    ever appear and the edge count stays n·k/2. Weights are drawn from 1
    to 10 after the topology is final.
    """
    if k % 2 != 0:
        raise ValueError("k must be even")
    if not 2 <= k < n:
        raise ValueError("need 2 <= k < n")
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    rng = _stream(seed, _TOPOLOGY_STREAM)
    present: set[tuple[int, int]] = set()
    neighbors: list[set[int]] = [set() for _ in range(n)]

    def add(a: int, b: int) -> None:
        key = (a, b) if a < b else (b, a)
        present.add(key)
        neighbors[a].add(b)
        neighbors[b].add(a)

    def remove(a: int, b: int) -> None:
        key = (a, b) if a < b else (b, a)
        present.remove(key)
        neighbors[a].discard(b)
        neighbors[b].discard(a)

    lattice = []
    for v in range(n):
        for offset in range(1, k // 2 + 1):
            lattice.append((v, (v + offset) % n))
    for v, w in lattice:
        add(v, w)
    for v, w in lattice:
        if rng.random() >= beta:
            continue
        candidates = [u for u in range(n) if u != v and u not in neighbors[v]]
        if not candidates:
            continue  # vertex already adjacent to everyone else
        target = candidates[int(rng.integers(0, len(candidates)))]
        remove(v, w)
        add(v, target)
    return WeightedGraph(n, _draw_weights(sorted(present), seed))


def sample_nested_terminals(
    n: int, levels: int, seed: int
) -> tuple[frozenset[int], ...]:
    """Nested terminal sets with |T_i| = floor(n·(levels-i+1)/(levels+1)).

    Level 1 is sampled uniformly from all vertices and each higher level
    uniformly from the one below it, so nesting holds by construction.
    """
    if levels < 1:
        raise ValueError("need at least one level")
    sizes = [n * (levels - i + 1) // (levels + 1) for i in range(1, levels + 1)]
    if sizes[-1] < 2:
        raise ValueError(
            f"instance degenerate: top level would have {sizes[-1]} terminals"
        )
    rng = _stream(seed, _TERMINAL_STREAM)
    result = []
    pool = list(range(n))
    for size in sizes:
        chosen = rng.choice(len(pool), size=size, replace=False)
        pool = sorted(pool[i] for i in chosen)
        result.append(frozenset(pool))
    return tuple(result)


@dataclass(frozen=True)
class GeneratorSpec:
    """Complete recipe for one random instance."""

    family: str
    n: int
    levels: int
    stretch: float
    seed: int
    eps: float | None = None
    k: int | None = None
    beta: float | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 2:
            raise ValueError("need at least 2 vertices")
        if self.levels < 1:
            raise ValueError("need at least one level")
        if self.stretch < 1:
            raise ValueError("stretch must be at least 1")
        if self.family == "erdos_renyi":
            if self.eps is None or self.eps <= 0:
                raise ValueError("erdos_renyi requires eps > 0")
        else:
            if self.k is None or self.beta is None:
                raise ValueError("watts_strogatz requires k and beta")
            if self.k % 2 != 0 or not 2 <= self.k < self.n:
                raise ValueError("need even k with 2 <= k < n")
            if not 0.0 <= self.beta <= 1.0:
                raise ValueError("beta must lie in [0, 1]")

    def graph(self, seed: int | None = None) -> WeightedGraph:
        s = self.seed if seed is None else seed
        if self.family == "erdos_renyi":
            return erdos_renyi(self.n, self.eps, s)
        return watts_strogatz(self.n, self.k, self.beta, s)

    def provenance(self) -> list[str]:
        """Comment lines recording the recipe, for instance file headers."""
        parts = [f"family={self.family}", f"n={self.n}"]
        if self.family == "erdos_renyi":
            parts.append(f"eps={self.eps}")
        else:
            parts.append(f"k={self.k}")
            parts.append(f"beta={self.beta}")
        parts.append(f"levels={self.levels}")
        parts.append(f"stretch={self.stretch}")
        parts.append(f"seed={self.seed}")
        return ["# generated " + " ".join(parts)]


def build_instance(spec: GeneratorSpec) -> MLGSInstance:
    """Instance for the spec, retrying shifted seeds until connected.

    Random draws can produce disconnected graphs; the raw generators
    return them as-is, and this layer retries with seed+1, seed+2, ...
    up to 100 attempts before giving up. The terminal sample uses the
    same shifted seed as the accepted graph so a record of (spec,
    effective seed) fully reproduces the instance.
    """
    for offset in range(_MAX_CONNECTIVITY_ATTEMPTS):
        s = spec.seed + offset
        g = spec.graph(seed=s)
        if g.m > 0 and connected_over(g, range(g.n)):
            terminals = sample_nested_terminals(spec.n, spec.levels, s)
            return MLGSInstance(g, terminals, spec.stretch)
    raise ValueError(
        f"no connected graph within {_MAX_CONNECTIVITY_ATTEMPTS} attempts of seed {spec.seed}"
    )
