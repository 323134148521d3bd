"""Line-oriented text formats for instances and graded solutions.

Instance files::

    # comment
    nodes 6
    edge 0 1 1.5
    stretch 2
    level 1 0 1 2 3
    level 2 0 1

``nodes`` must come before any ``edge``. Levels are listed once each,
in order 1..L, and must be nested descending. Blank lines and lines
starting with ``#`` are ignored. Weights are decimal numbers.

Solution files hold one ``grade u v g`` line per positively graded
edge; omitted edges have grade 0.
"""

from __future__ import annotations

from .graph import WeightedGraph
from .multilevel import GradedSubgraph, MLGSInstance


class InstanceFormatError(ValueError):
    """Malformed instance or solution text; carries the offending line."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


def _content_lines(text: str) -> list[tuple[int, list[str]]]:
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        lines.append((number, stripped.split()))
    return lines


def _parse_int(token: str, line: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise InstanceFormatError(line, f"{what} must be an integer, got {token!r}") from None


def _parse_float(token: str, line: int, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise InstanceFormatError(line, f"{what} must be a number, got {token!r}") from None


def parse_instance(text: str) -> MLGSInstance:
    """Parse instance text; raises :class:`InstanceFormatError` on bad input."""
    n: int | None = None
    edges: list[tuple[int, int, float]] = []
    stretch: float | None = None
    levels: list[frozenset[int]] = []
    for line, tokens in _content_lines(text):
        keyword, args = tokens[0], tokens[1:]
        if keyword == "nodes":
            if n is not None:
                raise InstanceFormatError(line, "duplicate nodes line")
            if len(args) != 1:
                raise InstanceFormatError(line, "expected: nodes <count>")
            n = _parse_int(args[0], line, "node count")
            if n <= 0:
                raise InstanceFormatError(line, f"node count must be positive, got {n}")
        elif keyword == "edge":
            if n is None:
                raise InstanceFormatError(line, "edge before nodes line")
            if len(args) != 3:
                raise InstanceFormatError(line, "expected: edge <u> <v> <weight>")
            u = _parse_int(args[0], line, "endpoint")
            v = _parse_int(args[1], line, "endpoint")
            w = _parse_float(args[2], line, "weight")
            if not (0 <= u < n and 0 <= v < n):
                raise InstanceFormatError(line, f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise InstanceFormatError(line, f"self loop at vertex {u}")
            if w <= 0:
                raise InstanceFormatError(line, f"weight must be positive, got {w}")
            edges.append((u, v, w))
        elif keyword == "stretch":
            if stretch is not None:
                raise InstanceFormatError(line, "duplicate stretch line")
            if len(args) != 1:
                raise InstanceFormatError(line, "expected: stretch <t>")
            stretch = _parse_float(args[0], line, "stretch factor")
            if stretch < 1:
                raise InstanceFormatError(line, f"stretch must be at least 1, got {stretch}")
        elif keyword == "level":
            if n is None:
                raise InstanceFormatError(line, "level before nodes line")
            if len(args) < 2:
                raise InstanceFormatError(line, "expected: level <index> <vertex...>")
            index = _parse_int(args[0], line, "level index")
            if index != len(levels) + 1:
                raise InstanceFormatError(
                    line, f"expected level {len(levels) + 1}, got level {index}"
                )
            members = [_parse_int(tok, line, "terminal") for tok in args[1:]]
            for v in members:
                if not 0 <= v < n:
                    raise InstanceFormatError(line, f"terminal {v} out of range for n={n}")
            if len(set(members)) != len(members):
                raise InstanceFormatError(line, "duplicate terminal in level")
            current = frozenset(members)
            if levels and not current <= levels[-1]:
                raise InstanceFormatError(line, "terminal sets not nested")
            levels.append(current)
        else:
            raise InstanceFormatError(line, f"unknown keyword {keyword!r}")
    if n is None:
        raise InstanceFormatError(0, "missing nodes line")
    if stretch is None:
        raise InstanceFormatError(0, "missing stretch line")
    if not levels:
        raise InstanceFormatError(0, "missing level lines")
    try:
        graph = WeightedGraph(n, edges)
        return MLGSInstance(graph, tuple(levels), stretch)
    except ValueError as exc:
        raise InstanceFormatError(0, str(exc)) from exc


def _format_number(x: float) -> str:
    if x == int(x):
        return str(int(x))
    return repr(x)


def serialize_instance(inst: MLGSInstance) -> str:
    """Canonical text for an instance; parses back to an equal value."""
    lines = [f"nodes {inst.graph.n}"]
    for u, v, w in inst.graph.edge_items():
        lines.append(f"edge {u} {v} {_format_number(w)}")
    lines.append(f"stretch {_format_number(inst.stretch)}")
    for level in range(1, inst.levels + 1):
        members = " ".join(str(v) for v in sorted(inst.terminal_set(level)))
        lines.append(f"level {level} {members}")
    return "\n".join(lines) + "\n"


def parse_solution(text: str) -> GradedSubgraph:
    grades: dict[tuple[int, int], int] = {}
    for line, tokens in _content_lines(text):
        if tokens[0] != "grade":
            raise InstanceFormatError(line, f"unknown keyword {tokens[0]!r}")
        if len(tokens) != 4:
            raise InstanceFormatError(line, "expected: grade <u> <v> <grade>")
        u = _parse_int(tokens[1], line, "endpoint")
        v = _parse_int(tokens[2], line, "endpoint")
        grade = _parse_int(tokens[3], line, "grade")
        if u == v:
            raise InstanceFormatError(line, f"self loop at vertex {u}")
        if grade < 0:
            raise InstanceFormatError(line, f"grade must be nonnegative, got {grade}")
        key = (u, v) if u < v else (v, u)
        if key in grades:
            raise InstanceFormatError(line, f"duplicate grade for edge {key}")
        grades[key] = grade
    return GradedSubgraph(grades)


def serialize_solution(solution: GradedSubgraph) -> str:
    lines = [f"grade {u} {v} {grade}" for (u, v), grade in solution.grades.items()]
    return "\n".join(lines) + ("\n" if lines else "")
