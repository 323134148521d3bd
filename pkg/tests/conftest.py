"""Shared test helpers.

The oracles here are deliberately primitive and independent of the
package internals: distances come from Bellman-Ford rather than the
library's Dijkstra, optima come from raw subset or grade-vector
enumeration, and model optima are derived by walking the model's own
constraint rows. Slow is fine; agreeing with the fast code for the
wrong reasons is not.
"""

from __future__ import annotations

import itertools
from pathlib import Path

import mlspan as M

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

INF = float("inf")
TOL = 1e-9


def load_instance(name: str) -> M.MLGSInstance:
    if not name.endswith(".txt"):
        name += ".txt"
    return M.parse_instance((FIXTURES / name).read_text())


def bf_distances(n: int, edges: list[tuple[int, int, float]], source: int) -> list[float]:
    """Bellman-Ford over undirected weighted edges."""
    dist = [INF] * n
    dist[source] = 0.0
    for _ in range(n - 1):
        changed = False
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
            if dist[v] + w < dist[u]:
                dist[u] = dist[v] + w
                changed = True
        if not changed:
            break
    return dist


def spans_within(
    n: int,
    kept: list[tuple[int, int, float]],
    demands: list[tuple[int, int, float]],
) -> bool:
    """True iff every (u, v, budget) demand is met inside the kept edges."""
    by_source: dict[int, list[tuple[int, float]]] = {}
    for u, v, budget in demands:
        by_source.setdefault(u, []).append((v, budget))
    for u, targets in by_source.items():
        dist = bf_distances(n, kept, u)
        for v, budget in targets:
            if dist[v] > budget + TOL:
                return False
    return True


def enumerate_pairwise_optimum(
    g: M.WeightedGraph, pairs: list[tuple[int, int]], t: float
) -> float:
    """Best subgraph cost over all 2^m edge subsets; demands from scratch."""
    items = list(g.edge_items())
    demands = []
    for u, v in pairs:
        base = bf_distances(g.n, items, u)[v]
        assert base < INF, "oracle requires connected pairs"
        demands.append((u, v, t * base))
    best = INF
    for bits in range(1 << len(items)):
        kept = [items[j] for j in range(len(items)) if bits >> j & 1]
        cost = sum(w for _, _, w in kept)
        if cost >= best:
            continue
        if spans_within(g.n, kept, demands):
            best = cost
    return best


def enumerate_mlgs_optimum(inst: M.MLGSInstance) -> float:
    """Best graded cost by checking every grade vector against Bellman-Ford."""
    items = list(inst.graph.edge_items())
    m = len(items)
    levels = inst.levels
    level_demands = []
    for i in range(1, levels + 1):
        ts = sorted(inst.terminal_set(i))
        demands = []
        for a in range(len(ts)):
            for b in range(a + 1, len(ts)):
                u, v = ts[a], ts[b]
                base = bf_distances(inst.graph.n, items, u)[v]
                assert base < INF
                demands.append((u, v, inst.stretch * base))
        level_demands.append(demands)

    feasible_cache: dict[tuple[int, int], bool] = {}

    def level_ok(level_idx: int, bits: int) -> bool:
        key = (level_idx, bits)
        if key not in feasible_cache:
            kept = [items[j] for j in range(m) if bits >> j & 1]
            feasible_cache[key] = spans_within(
                inst.graph.n, kept, level_demands[level_idx]
            )
        return feasible_cache[key]

    best = INF
    for vec in itertools.product(range(levels + 1), repeat=m):
        cost = sum(w * grade for (_, _, w), grade in zip(items, vec))
        if cost >= best:
            continue
        if all(
            level_ok(i, sum(1 << j for j in range(m) if vec[j] > i))
            for i in range(levels)
        ):
            best = cost
    return best


def random_instance(
    rng,
    n_range=(4, 7),
    m_max=10,
    levels=2,
    stretch=2.0,
    max_weight=9,
) -> M.MLGSInstance:
    """Small connected instance drawn with the stdlib generator."""
    while True:
        n = rng.randint(*n_range)
        possible = [(u, v) for u in range(n) for v in range(u + 1, n)]
        rng.shuffle(possible)
        m = rng.randint(n - 1, max(n - 1, min(m_max, len(possible))))
        edges = [(u, v, float(rng.randint(1, max_weight))) for u, v in possible[:m]]
        g = M.WeightedGraph(n, edges)
        if not M.connected_over(g, range(n)):
            continue
        terminals = []
        pool = list(range(n))
        size = rng.randint(max(2, n - 2), n)
        for _ in range(levels):
            pool = sorted(rng.sample(pool, size))
            terminals.append(frozenset(pool))
            size = max(2, rng.randint(2, size))
        return M.MLGSInstance(g, tuple(terminals), stretch)


def _model_edges(model: M.IlpModel) -> list[tuple[tuple[int, int], float]]:
    """Edges and weights recovered from the model's own objective row."""
    edges = []
    for name, coef in model.objective:
        parts = name.split("_")
        u, v = int(parts[-2]), int(parts[-1])
        edges.append(((u, v), coef))
    return edges


def _satisfies(con: M.IlpConstraint, assignment: dict[str, float]) -> bool:
    total = 0.0
    for name, coef in con.coefficients:
        value = assignment.get(name)
        if value:
            total += coef * value
    if con.sense == "<=":
        return total <= con.rhs + TOL
    if con.sense == ">=":
        return total >= con.rhs - TOL
    return abs(total - con.rhs) <= TOL


def model_optimum_by_enumeration(model: M.IlpModel) -> float:
    """Optimum of a built model derived from its variables and constraints.

    Enumerates the purchase variables (x_e or y) in nondecreasing cost
    order; a vector is feasible when each pair admits a routing whose
    induced 0/1 arc assignment satisfies every constraint naming that
    pair. Pairs share only purchase variables, so per-pair search is
    exact, and the first feasible vector is the optimum. The winning
    full assignment is re-checked against the whole model as a guard.
    """
    edges = _model_edges(model)
    purchase_names = [name for name, _ in model.objective]
    wanted = set(purchase_names)
    bounds = {
        var.name: (int(var.lower), int(var.upper))
        for var in model.variables
        if var.name in wanted
    }
    pairs = list(model.metadata["pairs"])

    by_pair: dict[tuple[int, int], list[M.IlpConstraint]] = {p: [] for p in pairs}
    for con in model.constraints:
        tag = con.name.split("_")
        pair = (int(tag[1]), int(tag[2]))
        by_pair[pair].append(con)

    adjacency: dict[int, list[int]] = {}
    for (u, v), _ in edges:
        adjacency.setdefault(u, []).append(v)
        adjacency.setdefault(v, []).append(u)

    def simple_path_arcs(source: int, target: int) -> list[list[tuple[int, int]]]:
        found = []
        stack = [(source, [source], [])]
        while stack:
            vertex, seen, arcs = stack.pop()
            if vertex == target:
                found.append(arcs)
                continue
            for nxt in adjacency.get(vertex, []):
                if nxt not in seen:
                    stack.append((nxt, seen + [nxt], arcs + [(vertex, nxt)]))
        return found

    paths_for: dict[tuple[int, int], list[dict[str, float]]] = {}
    for u, v in pairs:
        paths_for[(u, v)] = [
            {f"xa_{u}_{v}_{s}_{d}": 1.0 for s, d in arcs}
            for arcs in simple_path_arcs(u, v)
        ]

    def pair_routing(pair, base: dict[str, float]) -> dict[str, float] | None:
        group = by_pair[pair]
        for arc_values in paths_for[pair]:
            candidate = {**base, **arc_values}
            if all(_satisfies(con, candidate) for con in group):
                return arc_values
        return None

    ranges = [range(bounds[name][0], bounds[name][1] + 1) for name in purchase_names]
    weights = [coef for _, coef in edges]
    vectors = sorted(
        itertools.product(*ranges),
        key=lambda vec: (sum(w * x for w, x in zip(weights, vec)), vec),
    )
    for vec in vectors:
        base = {name: float(value) for name, value in zip(purchase_names, vec)}
        full = dict(base)
        ok = True
        for pair in pairs:
            routing = pair_routing(pair, base)
            if routing is None:
                ok = False
                break
            full.update(routing)
        if ok:
            assert model.check_assignment(full) == []
            return sum(w * x for w, x in zip(weights, vec))
    return INF
