"""Multi-level spanner instances, solutions, and approximation algorithms.

An instance fixes a weighted graph, a stretch factor t, and nested
terminal sets T_1 over T_2 ... over T_L (level 1 is the widest). A
solution assigns each edge an integer grade in 0..L; the edges of grade
at least i must form a t-spanner of the input graph over all pairs of
T_i, and the cost charges each edge weight once per grade unit.

Equivalently a solution is a nested chain of subgraphs G_L through G_1,
where G_i is the grade >= i edge set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal

from .graph import (
    EPS,
    INF,
    WeightedGraph,
    _dijkstra,
    connected_over,
    normalize_pair,
)
from .spanners import path_union_preserver, subsetwise_spanner

SubsetSolver = Literal["heuristic", "exact"]


@dataclass(frozen=True)
class MLGSInstance:
    """A multi-level spanner problem.

    ``terminals[i]`` is the terminal set of level i+1; sets must be
    nested descending and the top level needs at least two vertices.
    """

    graph: WeightedGraph
    terminals: tuple[frozenset[int], ...]
    stretch: float

    def __post_init__(self) -> None:
        if self.stretch < 1:
            raise ValueError(f"stretch factor must be at least 1, got {self.stretch}")
        if not self.terminals:
            raise ValueError("need at least one terminal level")
        levels = tuple(frozenset(ts) for ts in self.terminals)
        object.__setattr__(self, "terminals", levels)
        for i, ts in enumerate(levels, start=1):
            for v in ts:
                if not 0 <= v < self.graph.n:
                    raise ValueError(f"terminal {v} at level {i} out of range")
        for i in range(len(levels) - 1):
            if not levels[i + 1] <= levels[i]:
                raise ValueError(
                    f"terminal sets not nested: level {i + 2} is not a subset of level {i + 1}"
                )
        if len(levels[-1]) < 2:
            raise ValueError("top level needs at least two terminals")

    @property
    def levels(self) -> int:
        return len(self.terminals)

    def terminal_set(self, level: int) -> frozenset[int]:
        if not 1 <= level <= self.levels:
            raise ValueError(f"level {level} out of range 1..{self.levels}")
        return self.terminals[level - 1]

    def required_grade(self, v: int) -> int:
        """Highest level whose terminal set contains v, 0 if none."""
        for level in range(self.levels, 0, -1):
            if v in self.terminals[level - 1]:
                return level
        return 0

    def pair_grade(self, u: int, v: int) -> int:
        """Grade both endpoints demand together: min of their grades."""
        return min(self.required_grade(u), self.required_grade(v))

    def level_pairs(self, level: int) -> tuple[tuple[int, int], ...]:
        ts = sorted(self.terminal_set(level))
        return tuple(
            (ts[i], ts[j]) for i in range(len(ts)) for j in range(i + 1, len(ts))
        )


@dataclass(frozen=True)
class GradedSubgraph:
    """Per-edge grades of a solution; grade-0 edges are omitted."""

    grades: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cleaned: dict[tuple[int, int], int] = {}
        for (u, v), grade in self.grades.items():
            if int(grade) != grade or grade < 0:
                raise ValueError(f"grade of edge ({u}, {v}) must be a nonnegative integer")
            if grade == 0:
                continue
            cleaned[normalize_pair(u, v)] = int(grade)
        object.__setattr__(self, "grades", dict(sorted(cleaned.items())))

    @classmethod
    def from_levels(
        cls, level_edges: Iterable[Iterable[tuple[int, int]]]
    ) -> GradedSubgraph:
        """Build grades from the nested chain (E_1, E_2, ..., E_L)."""
        grades: dict[tuple[int, int], int] = {}
        previous: frozenset[tuple[int, int]] | None = None
        for level, edges in enumerate(level_edges, start=1):
            current = frozenset(normalize_pair(u, v) for u, v in edges)
            if previous is not None and not current <= previous:
                raise ValueError(f"level {level} edges are not nested in level {level - 1}")
            for key in current:
                grades[key] = level
            previous = current
        return cls(grades)

    def level_edges(self, level: int) -> frozenset[tuple[int, int]]:
        """Edges of grade at least ``level``."""
        if level < 1:
            raise ValueError(f"level must be at least 1, got {level}")
        return frozenset(key for key, grade in self.grades.items() if grade >= level)

    def grade(self, u: int, v: int) -> int:
        return self.grades.get(normalize_pair(u, v), 0)

    @property
    def max_grade(self) -> int:
        return max(self.grades.values(), default=0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedSubgraph):
            return NotImplemented
        return self.grades == other.grades

    def __hash__(self) -> int:
        return hash(tuple(self.grades.items()))


def solution_cost(inst: MLGSInstance, solution: GradedSubgraph) -> float:
    """Sum of edge weight times grade; equals the cost of the nested chain."""
    total = 0.0
    for key, grade in solution.grades.items():
        if not inst.graph.has_edge(*key):
            raise ValueError(f"graded edge {key} is not an instance edge")
        total += inst.graph.weight_of(key) * grade
    return total


@dataclass(frozen=True)
class LevelViolation:
    level: int
    u: int
    v: int
    subgraph_distance: float
    allowed: float


def validate_mlgs(inst: MLGSInstance, solution: GradedSubgraph) -> list[LevelViolation]:
    """All stretch violations of the solution, across every level.

    Empty result means the solution is feasible. Grades above the
    instance level count are rejected as argument errors.
    """
    if solution.max_grade > inst.levels:
        raise ValueError(
            f"solution grade {solution.max_grade} exceeds instance levels {inst.levels}"
        )
    for key in solution.grades:
        if not inst.graph.has_edge(*key):
            raise ValueError(f"graded edge {key} is not an instance edge")
    g = inst.graph
    violations: list[LevelViolation] = []
    base_rows: dict[int, list[float]] = {}
    for level in range(1, inst.levels + 1):
        h = g.subgraph(solution.level_edges(level))
        ts = sorted(inst.terminal_set(level))
        for i, u in enumerate(ts):
            if u not in base_rows:
                base_rows[u] = _dijkstra(g._adj, g.n, u)
            level_dist = _dijkstra(h._adj, h.n, u)
            for v in ts[i + 1 :]:
                allowed = inst.stretch * base_rows[u][v]
                if level_dist[v] > allowed + EPS:
                    violations.append(LevelViolation(level, u, v, level_dist[v], allowed))
    return violations


def _require_solvable(inst: MLGSInstance) -> None:
    if not connected_over(inst.graph, inst.terminal_set(1)):
        raise ValueError("level 1 terminals are not connected; instance is infeasible")


def _subset_spanner_edges(
    g: WeightedGraph,
    terminals: frozenset[int],
    t: float,
    subsolver: SubsetSolver,
    node_limit: int | None,
) -> frozenset[tuple[int, int]]:
    if len(terminals) < 2:
        return frozenset()
    if subsolver == "heuristic":
        return subsetwise_spanner(g, terminals, t)
    if subsolver == "exact":
        from .exact import solve_subsetwise

        return solve_subsetwise(g, terminals, t, node_limit=node_limit)
    raise ValueError(f"unknown subset solver {subsolver!r}")


def bottom_up(
    inst: MLGSInstance,
    subsolver: SubsetSolver = "heuristic",
    node_limit: int | None = None,
) -> GradedSubgraph:
    """Solve the widest level once, then prune copies for upper levels.

    Level 1 is solved as a subsetwise spanner over T_1. Each higher
    level keeps only the union of shortest paths between its terminals
    computed inside the level below, which preserves those distances
    exactly and therefore keeps every level feasible. Level 1 is never
    pruned.
    """
    _require_solvable(inst)
    level_sets: list[frozenset[tuple[int, int]]] = []
    base = _subset_spanner_edges(
        inst.graph, inst.terminal_set(1), inst.stretch, subsolver, node_limit
    )
    level_sets.append(base)
    for level in range(2, inst.levels + 1):
        below = inst.graph.subgraph(level_sets[-1])
        ts = sorted(inst.terminal_set(level))
        pairs = [(u, v) for i, u in enumerate(ts) for v in ts[i + 1 :]]
        level_sets.append(path_union_preserver(below, pairs))
    return GradedSubgraph.from_levels(level_sets)


def top_down(
    inst: MLGSInstance,
    subsolver: SubsetSolver = "heuristic",
    node_limit: int | None = None,
) -> GradedSubgraph:
    """Solve each level independently and accumulate downward.

    The top level is a subsetwise spanner over T_L; every lower level is
    its own subsetwise spanner merged with everything above it.
    """
    _require_solvable(inst)
    reversed_sets: list[frozenset[tuple[int, int]]] = []
    for level in range(inst.levels, 0, -1):
        own = _subset_spanner_edges(
            inst.graph, inst.terminal_set(level), inst.stretch, subsolver, node_limit
        )
        if reversed_sets:
            own = own | reversed_sets[-1]
        reversed_sets.append(own)
    return GradedSubgraph.from_levels(reversed(reversed_sets))


def combined(
    inst: MLGSInstance,
    subsolver: SubsetSolver = "heuristic",
    node_limit: int | None = None,
) -> tuple[GradedSubgraph, str]:
    """Cheaper of :func:`bottom_up` and :func:`top_down`; ties go top-down."""
    bu = bottom_up(inst, subsolver, node_limit)
    td = top_down(inst, subsolver, node_limit)
    if solution_cost(inst, bu) < solution_cost(inst, td) - EPS:
        return bu, "bu"
    return td, "td"
