"""Flow-based integer programs for pairwise and multi-level spanners.

The pairwise model routes one unit of flow per requested pair over a
directed copy of the graph, bounds each pair's routed length by its
stretch budget, and couples arc use to edge purchase. The multi-level
model replaces the binary edge variable with an integer grade and
couples every arc that a pair routes over to a grade at least that
pair's level. Models are plain data: builders never call a solver, and
the text emitter writes the standard LP file sections so any external
solver can consume them.

Size reduction applies three tests before a model is built: an edge
strictly beaten by a detour between its own endpoints is deleted, an
arc no pair can route through within budget is fixed to zero, and an
arc whose removal puts a pair out of budget is fixed to one. Reduced
models keep their optimum; the fixings record what was decided.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .graph import EPS, INF, WeightedGraph, single_source_distances

Arc = tuple[int, int]
Pair = tuple[int, int]
Edge = tuple[int, int]


class DirectedArcs:
    """Directed double cover of an undirected graph's edge set."""

    def __init__(self, g: WeightedGraph):
        self.arcs: list[Arc] = []
        self.weight: dict[Arc, float] = {}
        self._out: dict[int, list[Arc]] = {v: [] for v in range(g.n)}
        self._in: dict[int, list[Arc]] = {v: [] for v in range(g.n)}
        for u, v, w in g.edge_items():
            for arc in ((u, v), (v, u)):
                self.arcs.append(arc)
                self.weight[arc] = w
                self._out[arc[0]].append(arc)
                self._in[arc[1]].append(arc)

    def outgoing(self, v: int) -> list[Arc]:
        return self._out[v]

    def incoming(self, v: int) -> list[Arc]:
        return self._in[v]


@dataclass(frozen=True)
class IlpVariable:
    name: str
    kind: str  # binary | integer
    lower: float = 0.0
    upper: float = 1.0
    relaxable: bool = False


@dataclass(frozen=True)
class IlpConstraint:
    name: str
    coefficients: tuple[tuple[str, float], ...]
    sense: str  # <= | >= | =
    rhs: float


@dataclass(frozen=True)
class IlpModel:
    objective: tuple[tuple[str, float], ...]
    variables: tuple[IlpVariable, ...]
    constraints: tuple[IlpConstraint, ...]
    metadata: dict = field(default_factory=dict, compare=False)

    def variable(self, name: str) -> IlpVariable:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    def objective_value(self, assignment: dict[str, float]) -> float:
        return sum(coef * assignment.get(name, 0.0) for name, coef in self.objective)

    def check_assignment(
        self, assignment: dict[str, float], tol: float = 1e-9
    ) -> list[str]:
        """Names of everything the assignment violates; absent values are 0."""
        bad: list[str] = []
        for var in self.variables:
            value = assignment.get(var.name, 0.0)
            if value < var.lower - tol or value > var.upper + tol:
                bad.append(f"bounds:{var.name}")
            if var.kind in ("binary", "integer") and abs(value - round(value)) > tol:
                bad.append(f"integrality:{var.name}")
        for con in self.constraints:
            total = sum(coef * assignment.get(name, 0.0) for name, coef in con.coefficients)
            if con.sense == "<=":
                ok = total <= con.rhs + tol
            elif con.sense == ">=":
                ok = total >= con.rhs - tol
            else:
                ok = abs(total - con.rhs) <= tol
            if not ok:
                bad.append(con.name)
        return bad


@dataclass(frozen=True)
class Fixings:
    """Variables decided by preprocessing, keyed structurally.

    ``zero_arcs`` and ``one_arcs`` hold (pair, arc) entries; ``one_edges``
    are undirected edges whose purchase variable is forced on;
    ``deleted_edges`` were removed from the graph outright.
    """

    deleted_edges: frozenset[Edge] = frozenset()
    zero_arcs: frozenset[tuple[Pair, Arc]] = frozenset()
    one_arcs: frozenset[tuple[Pair, Arc]] = frozenset()
    one_edges: frozenset[Edge] = frozenset()

    def conflicts(self) -> list[tuple[Pair, Arc]]:
        return sorted(self.zero_arcs & self.one_arcs)

    def is_empty(self) -> bool:
        return not (
            self.deleted_edges or self.zero_arcs or self.one_arcs or self.one_edges
        )


def _edge_var(u: int, v: int) -> str:
    return f"x_e_{u}_{v}"


def _grade_var(u: int, v: int) -> str:
    return f"y_{u}_{v}"


def _arc_var(pair: Pair, arc: Arc) -> str:
    return f"xa_{pair[0]}_{pair[1]}_{arc[0]}_{arc[1]}"


def _normalize_pairs(pairs) -> list[Pair]:
    seen = sorted({(u, v) if u < v else (v, u) for u, v in pairs})
    for u, v in seen:
        if u == v:
            raise ValueError(f"pair ({u}, {v}) is degenerate")
    return seen


def _pair_budgets(g: WeightedGraph, pairs: list[Pair], t: float) -> dict[Pair, float]:
    budgets: dict[Pair, float] = {}
    rows: dict[int, list[float]] = {}
    for u, v in pairs:
        if u not in rows:
            rows[u] = single_source_distances(g, u)
        d = rows[u][v]
        if d == INF:
            raise ValueError(f"pair ({u}, {v}) is disconnected")
        budgets[(u, v)] = t * d
    return budgets


def _apply_fixing_bounds(
    var: IlpVariable, pair: Pair | None, arc: Arc | None, fixings: Fixings | None
) -> IlpVariable:
    if fixings is None or pair is None or arc is None:
        return var
    key = (pair, arc)
    if key in fixings.zero_arcs:
        return IlpVariable(var.name, var.kind, 0.0, 0.0, var.relaxable)
    if key in fixings.one_arcs:
        return IlpVariable(var.name, var.kind, 1.0, 1.0, var.relaxable)
    return var


def _routing_rows(
    g: WeightedGraph,
    arcs: DirectedArcs,
    pair: Pair,
    budget: float,
    fixings: Fixings | None,
) -> tuple[list[IlpVariable], list[IlpConstraint]]:
    """Per-pair arc variables plus length, flow, and degree constraints."""
    u, v = pair
    variables = []
    for arc in arcs.arcs:
        var = IlpVariable(_arc_var(pair, arc), "binary", relaxable=True)
        variables.append(_apply_fixing_bounds(var, pair, arc, fixings))

    constraints = [
        IlpConstraint(
            f"len_{u}_{v}",
            tuple((_arc_var(pair, arc), arcs.weight[arc]) for arc in arcs.arcs),
            "<=",
            budget,
        )
    ]
    for i in range(g.n):
        terms = [(_arc_var(pair, arc), 1.0) for arc in arcs.outgoing(i)]
        terms += [(_arc_var(pair, arc), -1.0) for arc in arcs.incoming(i)]
        if not terms:
            continue
        rhs = 1.0 if i == u else (-1.0 if i == v else 0.0)
        constraints.append(IlpConstraint(f"flow_{u}_{v}_{i}", tuple(terms), "=", rhs))
    for i in range(g.n):
        outgoing = arcs.outgoing(i)
        if not outgoing:
            continue
        constraints.append(
            IlpConstraint(
                f"deg_{u}_{v}_{i}",
                tuple((_arc_var(pair, arc), 1.0) for arc in outgoing),
                "<=",
                1.0,
            )
        )
    return variables, constraints


def build_pairwise_model(
    g: WeightedGraph,
    pairs,
    t: float,
    fixings: Fixings | None = None,
) -> IlpModel:
    """Minimum-weight subgraph routing every pair within t times its distance.

    Variables: one binary purchase variable per edge plus one binary arc
    variable per (pair, direction), so |E| + 2|E||K| in total. Arc
    variables are marked relaxable: rounding the purchase variables up
    re-yields a valid routing, so solvers may treat them as continuous.
    """
    if t < 1:
        raise ValueError("stretch must be at least 1")
    if fixings is not None and fixings.conflicts():
        raise ValueError(f"conflicting fixings: {fixings.conflicts()[:3]}")
    normalized = _normalize_pairs(pairs)
    budgets = _pair_budgets(g, normalized, t)
    arcs = DirectedArcs(g)

    variables: list[IlpVariable] = []
    constraints: list[IlpConstraint] = []
    one_edges = fixings.one_edges if fixings is not None else frozenset()
    for a, b, _ in g.edge_items():
        lower = 1.0 if (a, b) in one_edges else 0.0
        variables.append(IlpVariable(_edge_var(a, b), "binary", lower, 1.0))
    objective = tuple((_edge_var(a, b), w) for a, b, w in g.edge_items())

    for pair in normalized:
        pair_vars, pair_cons = _routing_rows(g, arcs, pair, budgets[pair], fixings)
        variables.extend(pair_vars)
        constraints.extend(pair_cons)
        u, v = pair
        for a, b, _ in g.edge_items():
            constraints.append(
                IlpConstraint(
                    f"cpl_{u}_{v}_{a}_{b}",
                    (
                        (_arc_var(pair, (a, b)), 1.0),
                        (_arc_var(pair, (b, a)), 1.0),
                        (_edge_var(a, b), -1.0),
                    ),
                    "<=",
                    0.0,
                )
            )

    metadata = {
        "kind": "pairwise",
        "pairs": tuple(normalized),
        "budgets": budgets,
        "edge_count": g.m,
        "expected_variables": g.m + 2 * g.m * len(normalized),
        "relaxable": tuple(v.name for v in variables if v.relaxable),
    }
    return IlpModel(objective, tuple(variables), tuple(constraints), metadata)


def build_mlgs_model(inst, fixings: Fixings | None = None) -> IlpModel:
    """Grade-purchase model: integer grades coupled to per-pair routings.

    Pairs range over the level-1 terminals; a pair needed up to level m
    forces grade at least m on every arc its routing uses. Objective is
    the grade-weighted edge cost, so the optimum equals the exact
    multi-level solver's objective.
    """
    if fixings is not None and fixings.conflicts():
        raise ValueError(f"conflicting fixings: {fixings.conflicts()[:3]}")
    g = inst.graph
    terminals = sorted(inst.terminal_set(1))
    pairs = [
        (terminals[i], terminals[j])
        for i in range(len(terminals))
        for j in range(i + 1, len(terminals))
    ]
    budgets = _pair_budgets(g, pairs, inst.stretch)
    arcs = DirectedArcs(g)
    levels = inst.levels

    variables: list[IlpVariable] = []
    constraints: list[IlpConstraint] = []
    one_edges = fixings.one_edges if fixings is not None else frozenset()
    for a, b, _ in g.edge_items():
        lower = 1.0 if (a, b) in one_edges else 0.0
        variables.append(IlpVariable(_grade_var(a, b), "integer", lower, float(levels)))
    objective = tuple((_grade_var(a, b), w) for a, b, w in g.edge_items())

    grades = {}
    for pair in pairs:
        grades[pair] = inst.pair_grade(*pair)

    for pair in pairs:
        pair_vars, pair_cons = _routing_rows(g, arcs, pair, budgets[pair], fixings)
        variables.extend(pair_vars)
        constraints.extend(pair_cons)
        u, v = pair
        m_uv = float(grades[pair])
        for arc in arcs.arcs:
            a, b = min(arc), max(arc)
            constraints.append(
                IlpConstraint(
                    f"grade_{u}_{v}_{arc[0]}_{arc[1]}",
                    (
                        (_arc_var(pair, arc), m_uv),
                        (_grade_var(a, b), -1.0),
                    ),
                    "<=",
                    0.0,
                )
            )

    metadata = {
        "kind": "mlgs",
        "pairs": tuple(pairs),
        "budgets": budgets,
        "pair_grades": grades,
        "levels": levels,
        "edge_count": g.m,
        "expected_variables": g.m + 2 * g.m * len(pairs),
        "relaxable": tuple(v.name for v in variables if v.relaxable),
    }
    return IlpModel(objective, tuple(variables), tuple(constraints), metadata)


def _directed_distance_without(
    g: WeightedGraph, banned: Arc, source: int
) -> list[float]:
    """Shortest distances when one direction of one edge is unusable."""
    dist = [INF] * g.n
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, x = heapq.heappop(heap)
        if d > dist[x]:
            continue
        for y, w in g.neighbors(x):
            if (x, y) == banned:
                continue
            nd = d + w
            if nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return dist


def reduce_instance(
    g: WeightedGraph, pairs, t: float
) -> tuple[WeightedGraph, Fixings]:
    """Shrink a pairwise model before it is built; optimum is preserved.

    Three tests run in order, and the whole sequence runs twice since
    deletions lengthen detours and can unlock further decisions:

    1. delete any edge some other path beats strictly;
    2. fix to zero any arc no pair can afford to route through, and
       delete edges with no usable direction left for any pair;
    3. fix to one any arc whose loss would push a pair over budget.

    Pair budgets are locked to distances in the graph as given, so
    later passes never relax a constraint.
    """
    if t < 1:
        raise ValueError("stretch must be at least 1")
    normalized = _normalize_pairs(pairs)
    budgets = _pair_budgets(g, normalized, t)
    endpoints = sorted({u for u, _ in normalized} | {v for _, v in normalized})

    active = g
    deleted: set[Edge] = set()
    zero_arcs: set[tuple[Pair, Arc]] = set()
    one_arcs: set[tuple[Pair, Arc]] = set()
    one_edges: set[Edge] = set()

    for _ in range(2):
        # test 1: strictly dominated edges
        doomed = []
        for a, b, c in active.edge_items():
            row = single_source_distances(active, a)
            if row[b] < c - EPS:
                doomed.append((a, b))
        if doomed:
            deleted.update(doomed)
            active = active.subgraph(
                [key for key in active.edges() if key not in deleted]
            )
            zero_arcs = {
                (pair, arc)
                for pair, arc in zero_arcs
                if (min(arc), max(arc)) not in deleted
            }

        # test 2: arcs out of reach of every budget
        rows = {w: single_source_distances(active, w) for w in endpoints}
        usable_direction: dict[Edge, set[Arc]] = {key: set() for key in active.edges()}
        for pair in normalized:
            u, v = pair
            ru, rv = rows[u], rows[v]
            budget = budgets[pair]
            for a, b, c in active.edge_items():
                for arc in ((a, b), (b, a)):
                    i, j = arc
                    if ru[i] + c + rv[j] > budget + EPS:
                        zero_arcs.add((pair, arc))
                    else:
                        usable_direction[(a, b)].add(arc)
        unusable = [key for key, dirs in usable_direction.items() if not dirs]
        if unusable:
            deleted.update(unusable)
            active = active.subgraph(
                [key for key in active.edges() if key not in deleted]
            )
            zero_arcs = {
                (pair, arc)
                for pair, arc in zero_arcs
                if (min(arc), max(arc)) not in deleted
            }

        # test 3: arcs every in-budget routing of some pair must use
        for a, b, _ in active.edge_items():
            for arc in ((a, b), (b, a)):
                cache: dict[int, list[float]] = {}
                for pair in normalized:
                    if (pair, arc) in zero_arcs:
                        continue
                    u, v = pair
                    if u not in cache:
                        cache[u] = _directed_distance_without(active, arc, u)
                    if cache[u][v] > budgets[pair] + EPS:
                        one_arcs.add((pair, arc))
                        one_edges.add((a, b))

    fixings = Fixings(
        deleted_edges=frozenset(deleted),
        zero_arcs=frozenset(zero_arcs),
        one_arcs=frozenset(one_arcs),
        one_edges=frozenset(one_edges),
    )
    return active, fixings


def _format_value(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _format_terms(terms) -> list[str]:
    """Render coefficient/name pairs as LP-format token groups."""
    groups = []
    for idx, (name, coef) in enumerate(terms):
        if idx == 0:
            sign = "-" if coef < 0 else ""
            groups.append(f"{sign}{_format_value(abs(coef))} {name}".lstrip())
        else:
            sign = "-" if coef < 0 else "+"
            groups.append(f"{sign} {_format_value(abs(coef))} {name}")
    return groups


def _wrap(prefix: str, groups: list[str], limit: int = 500) -> list[str]:
    lines = []
    current = prefix
    for group in groups:
        candidate = f"{current} {group}"
        if len(candidate) > limit and current != prefix:
            lines.append(current)
            current = f"  {group}"
        else:
            current = candidate
    lines.append(current)
    return lines


def emit_lp_text(model: IlpModel) -> str:
    """Standard LP file text; identical models emit identical bytes.

    Sections appear in the fixed order Minimize, Subject To, Bounds,
    General, Binary, End, with empty sections omitted. Relaxable arc
    variables are flagged in a leading comment so an external solver
    run can decide to drop their integrality.
    """
    lines: list[str] = []
    kind = model.metadata.get("kind")
    if kind:
        lines.append(f"\\ {kind} spanner model")
    relaxable = model.metadata.get("relaxable")
    if relaxable:
        lines.append(
            "\\ arc variables (xa_*) may be relaxed to continuous [0, 1]"
        )
    lines.append("Minimize")
    if model.objective:
        lines.extend(_wrap(" obj:", _format_terms(model.objective)))
    else:
        lines.append(" obj: 0")
    lines.append("Subject To")
    for con in model.constraints:
        groups = _format_terms(con.coefficients)
        groups.append(f"{con.sense} {_format_value(con.rhs)}")
        lines.extend(_wrap(f" {con.name}:", groups))

    bounds = []
    for var in model.variables:
        if var.kind == "integer":
            bounds.append(f" {_format_value(var.lower)} <= {var.name} <= {_format_value(var.upper)}")
        elif var.kind == "binary" and (var.lower, var.upper) != (0.0, 1.0):
            if var.lower == var.upper:
                bounds.append(f" {var.name} = {_format_value(var.lower)}")
            else:
                bounds.append(
                    f" {_format_value(var.lower)} <= {var.name} <= {_format_value(var.upper)}"
                )
    if bounds:
        lines.append("Bounds")
        lines.extend(bounds)

    generals = [var.name for var in model.variables if var.kind == "integer"]
    if generals:
        lines.append("General")
        lines.extend(f" {name}" for name in generals)
    binaries = [var.name for var in model.variables if var.kind == "binary"]
    if binaries:
        lines.append("Binary")
        lines.extend(f" {name}" for name in binaries)
    lines.append("End")
    return "\n".join(lines) + "\n"
