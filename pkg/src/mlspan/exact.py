"""Built-in exact solvers for multi-level and pairwise spanner problems.

The main solver runs branch and bound directly over per-edge grades.
Before searching it derives a sound grade interval for every edge:

* an upper bound from admissibility: if no terminal pair at level i can
  route through an edge within its length budget, the edge never needs
  grade i (and an edge beaten by a strictly shorter path between its
  endpoints never helps at all and is dropped);
* a lower bound from necessity: if deleting an edge pushes some pair at
  level i beyond its budget, every feasible solution grades the edge at
  least i.

Both bounds only ever use distances that lower-bound path lengths in
feasible solutions, so the optimal objective is preserved. Search
branches on the remaining free edges in nonincreasing weight order,
tries cheap grades first, prunes on cost against the incumbent, and
prunes by level feasibility checked on memoized edge bitmasks.

A brute-force oracle enumerates the grade space for small instances and
resolves cost ties toward the lexicographically smallest grade vector
over the canonical edge order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .graph import (
    EPS,
    INF,
    WeightedGraph,
    connected_over,
    shortest_path,
    single_source_distances,
)
from .multilevel import (
    GradedSubgraph,
    MLGSInstance,
    combined,
    validate_mlgs,
)
from .spanners import path_union_preserver, subsetwise_spanner

DEFAULT_NODE_LIMIT = 10_000_000

BRUTE_FORCE_CAP = 1 << 24


class ExactBudgetError(RuntimeError):
    """The search hit its node limit before proving optimality."""


@dataclass(frozen=True)
class ExactResult:
    """Outcome of an exact solve.

    ``status`` is ``optimal``, ``unsolved``, or ``infeasible``. For
    ``unsolved`` the objective and solution are the best incumbent found
    (possibly ``None``), not a proved optimum.
    """

    status: str
    objective: float | None
    solution: GradedSubgraph | None
    nodes: int


class _LevelSystem:
    """Feasibility oracle for per-level terminal pair budgets.

    A candidate level subgraph is an integer bitmask over the edge list.
    Feasibility of a mask at a level means every pair of that level is
    within its budget inside the mask's subgraph. Results are memoized
    per level since branch and bound revisits masks constantly.
    """

    def __init__(
        self,
        g: WeightedGraph,
        level_pairs: list[list[tuple[int, int, float]]],
    ):
        self.g = g
        self.n = g.n
        self.edge_keys: list[tuple[int, int]] = list(g.edges())
        self.weights: list[float] = [g.weight_of(k) for k in self.edge_keys]
        self.m = len(self.edge_keys)
        self.levels_count = len(level_pairs)
        self.level_pairs = [list(pairs) for pairs in level_pairs]
        self.groups: list[list[tuple[int, list[tuple[int, float]], float]]] = []
        for pairs in level_pairs:
            by_source: dict[int, list[tuple[int, float]]] = {}
            for u, v, budget in pairs:
                by_source.setdefault(u, []).append((v, budget))
            level_groups = []
            for u in sorted(by_source):
                partners = sorted(by_source[u])
                level_groups.append((u, partners, max(b for _, b in partners)))
            self.groups.append(level_groups)
        self._memo: list[dict[int, bool]] = [{} for _ in level_pairs]

    def feasible(self, level_index: int, mask: int) -> bool:
        memo = self._memo[level_index]
        cached = memo.get(mask)
        if cached is not None:
            return cached
        ok = self._check(level_index, mask)
        if len(memo) > 1_500_000:
            memo.clear()
        memo[mask] = ok
        return ok

    def _check(self, level_index: int, mask: int) -> bool:
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        remaining = mask
        keys = self.edge_keys
        weights = self.weights
        while remaining:
            low = remaining & -remaining
            j = low.bit_length() - 1
            remaining ^= low
            u, v = keys[j]
            w = weights[j]
            adj[u].append((v, w))
            adj[v].append((u, w))
        for source, partners, cutoff in self.groups[level_index]:
            dist = self._bounded_dijkstra(adj, source, cutoff)
            for v, budget in partners:
                if dist[v] > budget + EPS:
                    return False
        return True

    def _bounded_dijkstra(
        self, adj: list[list[tuple[int, float]]], source: int, cutoff: float
    ) -> list[float]:
        dist = [INF] * self.n
        dist[source] = 0.0
        heap: list[tuple[float, int]] = [(0.0, source)]
        bound = cutoff + EPS
        while heap:
            d, v = heapq.heappop(heap)
            if d > dist[v]:
                continue
            if d > bound:
                break
            for w, weight in adj[v]:
                nd = d + weight
                if nd < dist[w]:
                    dist[w] = nd
                    heapq.heappush(heap, (nd, w))
        return dist


def _level_budget_pairs(
    g: WeightedGraph, level_terminals: list[frozenset[int]], t: float
) -> list[list[tuple[int, int, float]]]:
    """Per-level (u, v, budget) lists; budgets stay fixed to g distances."""
    rows: dict[int, list[float]] = {}
    needed = sorted(set().union(*level_terminals)) if level_terminals else []
    for u in needed:
        rows[u] = single_source_distances(g, u)
    levels = []
    for terminals in level_terminals:
        ts = sorted(terminals)
        pairs = []
        for i, u in enumerate(ts):
            for v in ts[i + 1 :]:
                base = rows[u][v]
                if base == INF:
                    raise ValueError(f"terminals {u} and {v} are disconnected")
                pairs.append((u, v, t * base))
        levels.append(pairs)
    return levels


def _grade_domains(
    g: WeightedGraph,
    level_pairs: list[list[tuple[int, int, float]]],
) -> tuple[WeightedGraph, dict[tuple[int, int], int], dict[tuple[int, int], int]]:
    """Sound per-edge grade intervals; returns (reduced graph, lb, ub).

    Edges whose upper bound collapses to zero are deleted. Distances are
    refreshed after deletions and the admissibility pass reruns once,
    since longer detours can only exclude more edges. Budgets are never
    recomputed.
    """
    levels_count = len(level_pairs)
    endpoints = sorted(
        {u for pairs in level_pairs for u, _, _ in pairs}
        | {v for pairs in level_pairs for _, v, _ in pairs}
    )
    active = g
    ub: dict[tuple[int, int], int] = {key: levels_count for key in active.edges()}

    for _ in range(2):
        rows = {u: single_source_distances(active, u) for u in endpoints}
        changed = False
        for a, b, c in active.edge_items():
            key = (a, b)
            best = 0
            for level in range(min(ub[key], levels_count), 0, -1):
                usable = False
                for u, v, budget in level_pairs[level - 1]:
                    ru, rv = rows[u], rows[v]
                    through = ru[a] + c + rv[b]
                    if through > budget + EPS:
                        through = ru[b] + c + rv[a]
                    if through <= budget + EPS:
                        usable = True
                        break
                if usable:
                    best = level
                    break
            # An edge strictly beaten by another path between its own
            # endpoints can always be replaced by that path at equal or
            # lower cost, so it never appears in an optimal solution.
            du = rows.get(a)
            if du is None:
                du = single_source_distances(active, a)
                rows[a] = du
            if du[b] < c - EPS:
                best = 0
            if best < ub[key]:
                ub[key] = best
                changed = True
        dropped = [key for key, bound in ub.items() if bound == 0]
        if dropped:
            keep = [key for key in active.edges() if ub[key] > 0]
            active = active.subgraph(keep)
            ub = {key: ub[key] for key in keep}
        if not changed:
            break

    lb: dict[tuple[int, int], int] = {key: 0 for key in active.edges()}
    removal_rows: dict[tuple[tuple[int, int], int], list[float]] = {}
    for level in range(levels_count, 0, -1):
        for u, v, budget in level_pairs[level - 1]:
            path = shortest_path(active, u, v)
            for key in path.edges():
                if lb[key] >= level:
                    continue
                cached = removal_rows.get((key, u))
                if cached is None:
                    reduced = active.without_edge(*key)
                    cached = single_source_distances(reduced, u)
                    removal_rows[(key, u)] = cached
                if cached[v] > budget + EPS:
                    lb[key] = level
    return active, lb, ub


def _system_masks(system: _LevelSystem, ub: list[int]) -> list[int]:
    masks = [0] * (system.levels_count + 1)
    for level in range(1, system.levels_count + 1):
        mask = 0
        for j in range(system.m):
            if ub[j] >= level:
                mask |= 1 << j
        masks[level] = mask
    return masks


def _search(
    system: _LevelSystem,
    lb: list[int],
    ub: list[int],
    seeds: list[list[int]],
    node_limit: int,
) -> tuple[str, float | None, list[int] | None, int]:
    """Branch and bound core; returns (status, cost, grades, nodes)."""
    m = system.m
    weights = system.weights
    levels_count = system.levels_count

    masks = _system_masks(system, ub)
    for level in range(1, levels_count + 1):
        if not system.feasible(level - 1, masks[level]):
            return ("infeasible", None, None, 0)

    base = 0.0
    for j in range(m):
        base += weights[j] * lb[j]

    best_cost = INF
    best_vec: list[int] | None = None
    for seed in seeds:
        cost = 0.0
        for j in range(m):
            cost += weights[j] * seed[j]
        if cost < best_cost:
            best_cost = cost
            best_vec = list(seed)

    order = [j for j in range(m) if lb[j] < ub[j]]
    order.sort(key=lambda j: (-weights[j], system.edge_keys[j]))

    vec = list(lb)
    state = {"nodes": 0, "aborted": False}

    def dfs(idx: int, bound: float) -> None:
        nonlocal best_cost, best_vec
        if idx == len(order):
            best_cost = bound
            best_vec = vec.copy()
            return
        j = order[idx]
        low, high = lb[j], ub[j]
        bit = 1 << j
        weight = weights[j]
        value = low
        while value <= high:
            state["nodes"] += 1
            if state["nodes"] > node_limit:
                state["aborted"] = True
                return
            node_bound = bound + weight * (value - low)
            if node_bound >= best_cost - EPS:
                return  # larger grades only cost more
            failing = 0
            touched: list[int] = []
            for level in range(value + 1, high + 1):
                new_mask = masks[level] & ~bit
                if not system.feasible(level - 1, new_mask):
                    failing = level
                    break
                masks[level] = new_mask
                touched.append(level)
            if failing:
                for level in touched:
                    masks[level] |= bit
                value = failing  # grades below the failing level stay infeasible
                continue
            vec[j] = value
            dfs(idx + 1, node_bound)
            for level in touched:
                masks[level] |= bit
            vec[j] = low
            if state["aborted"]:
                return
            value += 1

    dfs(0, base)
    if state["aborted"]:
        return ("unsolved", best_cost if best_vec is not None else None, best_vec, state["nodes"])
    if best_vec is None:
        return ("infeasible", None, None, state["nodes"])
    return ("optimal", best_cost, best_vec, state["nodes"])


def _seed_from_grades(
    system: _LevelSystem,
    grades: dict[tuple[int, int], int],
    lb: list[int],
    ub: list[int],
) -> list[int] | None:
    """Domain-clamped grade vector for a known feasible solution."""
    vec = list(lb)
    index = {key: j for j, key in enumerate(system.edge_keys)}
    for key, grade in grades.items():
        j = index.get(key)
        if j is None:
            return None  # solution uses an edge the reduction dropped
        vec[j] = max(grade, lb[j])
        if vec[j] > ub[j]:
            return None
    return vec


def solve_exact(
    inst: MLGSInstance, node_limit: int | None = None
) -> ExactResult:
    """Prove a minimum-cost grading, or report the search budget ran out.

    The incumbent starts from the cheaper of the two approximation
    algorithms run with the heuristic subset solver. Returned solutions
    are always validated; an exhausted node limit yields status
    ``unsolved`` together with the best incumbent rather than an
    unproved claim.
    """
    limit = DEFAULT_NODE_LIMIT if node_limit is None else node_limit
    g = inst.graph
    if not connected_over(g, inst.terminal_set(1)):
        return ExactResult("infeasible", None, None, 0)
    level_pairs = _level_budget_pairs(
        g, [inst.terminal_set(i) for i in range(1, inst.levels + 1)], inst.stretch
    )
    reduced, lb_map, ub_map = _grade_domains(g, level_pairs)
    system = _LevelSystem(reduced, level_pairs)
    lb = [lb_map[key] for key in system.edge_keys]
    ub = [ub_map[key] for key in system.edge_keys]

    seeds: list[list[int]] = []
    heuristic, _ = combined(inst, "heuristic")
    seed = _seed_from_grades(system, heuristic.grades, lb, ub)
    if seed is not None:
        seeds.append(seed)

    status, cost, vec, nodes = _search(system, lb, ub, seeds, limit)
    if status == "infeasible":
        return ExactResult("infeasible", None, None, nodes)
    solution = None
    if vec is not None:
        solution = GradedSubgraph(
            {key: value for key, value in zip(system.edge_keys, vec) if value > 0}
        )
        if validate_mlgs(inst, solution):
            raise RuntimeError("internal error: candidate solution failed validation")
    return ExactResult(status, cost, solution, nodes)


def solve_pairwise(
    g: WeightedGraph,
    pairs: list[tuple[int, int]],
    t: float,
    node_limit: int | None = None,
    warm_start: frozenset[tuple[int, int]] | None = None,
) -> ExactResult:
    """Minimum-cost subgraph spanning the given pairs within stretch t.

    Single-level specialization of :func:`solve_exact` over an explicit
    pair set; the solution grades every kept edge 1. ``warm_start`` may
    supply a known feasible edge set to tighten the initial incumbent.
    """
    limit = DEFAULT_NODE_LIMIT if node_limit is None else node_limit
    normalized = sorted({(u, v) if u < v else (v, u) for u, v in pairs})
    if not normalized:
        return ExactResult("optimal", 0.0, GradedSubgraph({}), 0)
    rows: dict[int, list[float]] = {}
    budget_pairs = []
    for u, v in normalized:
        if u not in rows:
            rows[u] = single_source_distances(g, u)
        base = rows[u][v]
        if base == INF:
            return ExactResult("infeasible", None, None, 0)
        budget_pairs.append((u, v, t * base))
    reduced, lb_map, ub_map = _grade_domains(g, [budget_pairs])
    system = _LevelSystem(reduced, [budget_pairs])
    lb = [lb_map[key] for key in system.edge_keys]
    ub = [ub_map[key] for key in system.edge_keys]

    seeds = []
    candidates = [path_union_preserver(g, normalized)]
    if warm_start is not None:
        candidates.append(frozenset(warm_start))
    for edges in candidates:
        seed = _seed_from_grades(system, {key: 1 for key in edges}, lb, ub)
        if seed is not None:
            seeds.append(seed)

    status, cost, vec, nodes = _search(system, lb, ub, seeds, limit)
    if status == "infeasible":
        return ExactResult("infeasible", None, None, nodes)
    solution = None
    if vec is not None:
        solution = GradedSubgraph(
            {key: value for key, value in zip(system.edge_keys, vec) if value > 0}
        )
    return ExactResult(status, cost, solution, nodes)


def solve_subsetwise(
    g: WeightedGraph,
    terminals: frozenset[int] | set[int],
    t: float,
    node_limit: int | None = None,
) -> frozenset[tuple[int, int]]:
    """Optimal t-spanner edge set over all pairs of the terminal set.

    Used as the exact subset solver inside the approximation
    algorithms. Raises :class:`ExactBudgetError` when the node limit is
    hit, since a silently suboptimal answer would void the algorithms'
    guarantees.
    """
    ts = sorted(set(terminals))
    limit = DEFAULT_NODE_LIMIT if node_limit is None else node_limit
    pairs = [(ts[i], ts[j]) for i in range(len(ts)) for j in range(i + 1, len(ts))]
    warm = subsetwise_spanner(g, ts, t) if len(ts) >= 2 else frozenset()
    result = solve_pairwise(g, pairs, t, node_limit=limit, warm_start=warm)
    if result.status == "unsolved":
        raise ExactBudgetError(
            f"subset spanner solve exceeded {limit} nodes"
        )
    if result.status == "infeasible":
        raise ValueError("terminals are disconnected")
    assert result.solution is not None
    return frozenset(result.solution.grades)


def brute_force_oracle(inst: MLGSInstance) -> ExactResult:
    """Reference optimum by exhausting the grade space of tiny instances.

    Guarded to at most 2**24 assignments. Ties between minimum-cost
    solutions resolve to the lexicographically smallest grade vector
    over the canonical sorted edge order. Infeasible instances (level 1
    terminals split across components) report status ``infeasible``.
    """
    g = inst.graph
    levels_count = inst.levels
    size = (levels_count + 1) ** g.m
    if size > BRUTE_FORCE_CAP:
        raise ValueError(
            f"grade space {size} exceeds the brute force cap {BRUTE_FORCE_CAP}"
        )
    if not connected_over(g, inst.terminal_set(1)):
        return ExactResult("infeasible", None, None, 0)
    level_pairs = _level_budget_pairs(
        g, [inst.terminal_set(i) for i in range(1, inst.levels + 1)], inst.stretch
    )
    system = _LevelSystem(g, level_pairs)
    m = system.m
    weights = system.weights

    masks = [0] + [(1 << m) - 1 for _ in range(levels_count)]
    for level in range(1, levels_count + 1):
        if not system.feasible(level - 1, masks[level]):
            return ExactResult("infeasible", None, None, 0)

    best_cost = sum(w * levels_count for w in weights)
    best_vec = [levels_count] * m
    state = {"nodes": 0, "seeded": True}
    vec = [0] * m

    def dfs(idx: int, cost: float) -> None:
        nonlocal best_cost, best_vec
        if idx == m:
            state["nodes"] += 1
            if cost < best_cost or (state["seeded"] and cost <= best_cost):
                best_cost = cost
                best_vec = vec.copy()
                state["seeded"] = False
            return
        bit = 1 << idx
        weight = weights[idx]
        value = 0
        while value <= levels_count:
            node_cost = cost + weight * value
            if node_cost > best_cost + 1e-12:
                return  # larger grades only cost more
            failing = 0
            touched: list[int] = []
            for level in range(value + 1, levels_count + 1):
                new_mask = masks[level] & ~bit
                if not system.feasible(level - 1, new_mask):
                    failing = level
                    break
                masks[level] = new_mask
                touched.append(level)
            if failing:
                for level in touched:
                    masks[level] |= bit
                value = failing
                continue
            vec[idx] = value
            dfs(idx + 1, node_cost)
            for level in touched:
                masks[level] |= bit
            vec[idx] = 0
            value += 1

    dfs(0, 0.0)
    solution = GradedSubgraph(
        {key: value for key, value in zip(system.edge_keys, best_vec) if value > 0}
    )
    return ExactResult("optimal", best_cost, solution, state["nodes"])
