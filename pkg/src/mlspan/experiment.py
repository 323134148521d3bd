"""Experiment pipeline: generate, solve, verify, and record as CSV.

A config describes a parameter grid (family, size, level count,
stretch). Every grid cell gets a fixed number of instances whose seeds
derive from the cell coordinates, so runs are reproducible and all
algorithm variants of one instance are paired on the same graph.
Records re-validate every solution before anything is written; the cost
column is always the validated cost of the stored solution, never a
solver's unchecked claim.

Ratios divide by the proved optimum when the exact solver finishes. In
large-graph mode the exact solver is skipped and ratios divide by the
cheaper of the two approximations, with the denominator choice stamped
into each row so the two regimes cannot be confused downstream.
"""

from __future__ import annotations

import csv
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.random import SeedSequence

from .exact import ExactBudgetError, solve_exact
from .generate import _FAMILIES, GeneratorSpec, build_instance
from .multilevel import bottom_up, combined, solution_cost, top_down, validate_mlgs

CSV_COLUMNS = [
    "family",
    "n",
    "m",
    "levels",
    "t",
    "seed",
    "algorithm",
    "subsolver",
    "cost",
    "opt_cost",
    "ratio",
    "ratio_denominator",
    "runtime_ms",
    "status",
]

AGGREGATE_COLUMNS = [
    "parameter",
    "value",
    "algorithm",
    "subsolver",
    "count",
    "min",
    "q1",
    "median",
    "q3",
    "max",
]

_ALGORITHMS = ("bu", "td", "min", "exact")
_SUBSOLVERS = ("heuristic", "exact")


def theorem_bound(algorithm: str, levels: int) -> float:
    """Worst-case ratio guarantee of each algorithm in oracle mode."""
    if algorithm == "bu":
        return float(levels)
    if algorithm == "td":
        return (levels + 1) / 2
    if algorithm == "min":
        return (levels + 2) / 3
    if algorithm == "exact":
        return 1.0
    raise ValueError(f"unknown algorithm {algorithm!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    families: tuple[str, ...] = ("erdos_renyi",)
    sizes: tuple[int, ...] = (20,)
    level_counts: tuple[int, ...] = (2,)
    stretches: tuple[float, ...] = (2.0,)
    instances_per_cell: int = 3
    algorithms: tuple[str, ...] = ("bu", "td", "min", "exact")
    subsolvers: tuple[str, ...] = ("heuristic",)
    seed: int = 0
    eps: float = 1.0
    k: int = 6
    beta: float = 0.2
    large_graph: bool = False
    node_limit: int = 1_000_000
    workers: int = 1

    def __post_init__(self):
        if not (self.families and self.sizes and self.level_counts and self.stretches):
            raise ValueError("empty parameter grid")
        if self.instances_per_cell < 1:
            raise ValueError("need at least one instance per cell")
        for family in self.families:
            if family not in _FAMILIES:
                raise ValueError(f"unknown family {family!r}")
        for algorithm in self.algorithms:
            if algorithm not in _ALGORITHMS:
                raise ValueError(f"unknown algorithm {algorithm!r}")
        for subsolver in self.subsolvers:
            if subsolver not in _SUBSOLVERS:
                raise ValueError(f"unknown subsolver {subsolver!r}")
        if self.workers < 1:
            raise ValueError("workers must be positive")

    def cells(self) -> list[tuple[str, int, int, float]]:
        return [
            (family, n, levels, t)
            for family in self.families
            for n in self.sizes
            for levels in self.level_counts
            for t in self.stretches
        ]


_BOOLEAN = {"true": True, "false": False, "yes": True, "no": False}

_LIST_KEYS = {
    "families": str,
    "n": int,
    "levels": int,
    "stretch": float,
    "algorithms": str,
    "subsolvers": str,
}

_SCALAR_KEYS = {
    "instances_per_cell": int,
    "seed": int,
    "eps": float,
    "k": int,
    "beta": float,
    "large_graph": bool,
    "node_limit": int,
    "workers": int,
}

_KEY_TO_FIELD = {
    "families": "families",
    "n": "sizes",
    "levels": "level_counts",
    "stretch": "stretches",
    "algorithms": "algorithms",
    "subsolvers": "subsolvers",
}


def parse_config(text: str) -> ExperimentConfig:
    """Flat ``key = value`` config; lists are comma separated.

    Recognized keys: families, n, levels, stretch, instances_per_cell,
    algorithms, subsolvers, seed, eps, k, beta, large_graph, node_limit,
    workers. Lines starting with ``#`` and blank lines are ignored.
    """
    values: dict = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {number}: expected key = value")
        key, _, rest = line.partition("=")
        key = key.strip()
        rest = rest.strip()
        if key in _LIST_KEYS:
            cast = _LIST_KEYS[key]
            try:
                items = tuple(cast(item.strip()) for item in rest.split(",") if item.strip())
            except ValueError as exc:
                raise ValueError(f"line {number}: {exc}") from None
            values[_KEY_TO_FIELD[key]] = items
        elif key in _SCALAR_KEYS:
            cast = _SCALAR_KEYS[key]
            try:
                if cast is bool:
                    values[key] = _BOOLEAN[rest.lower()]
                else:
                    values[key] = cast(rest)
            except (ValueError, KeyError):
                raise ValueError(f"line {number}: bad value {rest!r} for {key}") from None
        else:
            raise ValueError(f"line {number}: unknown key {key!r}")
    return ExperimentConfig(**values)


@dataclass(frozen=True)
class ExperimentRecord:
    family: str
    n: int
    m: int
    levels: int
    t: float
    seed: int
    algorithm: str
    subsolver: str
    cost: float | None
    opt_cost: float | None
    ratio: float | None
    ratio_denominator: str
    runtime_ms: float
    status: str

    def row(self) -> list[str]:
        return [
            self.family,
            str(self.n),
            str(self.m),
            str(self.levels),
            _fmt(self.t),
            str(self.seed),
            self.algorithm,
            self.subsolver,
            _fmt(self.cost),
            _fmt(self.opt_cost),
            _fmt(self.ratio),
            self.ratio_denominator,
            f"{self.runtime_ms:.3f}",
            self.status,
        ]


def _fmt(x: float | None) -> str:
    if x is None:
        return ""
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def instance_seed(base: int, family: str, n: int, levels: int, t: float, index: int) -> int:
    """Stable 64-bit seed from the cell coordinates and instance index."""
    entropy = (base, _FAMILIES.index(family), n, levels, round(t * 1000), index)
    return int(SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])


def _cell_spec(config: ExperimentConfig, family: str, n: int, levels: int, t: float, seed: int) -> GeneratorSpec:
    if family == "erdos_renyi":
        return GeneratorSpec(family, n, levels, t, seed, eps=config.eps)
    return GeneratorSpec(family, n, levels, t, seed, k=config.k, beta=config.beta)


def _validated_cost(inst, solution) -> float:
    violations = validate_mlgs(inst, solution)
    if violations:
        raise ValueError(f"solution failed validation: {violations[0]}")
    return solution_cost(inst, solution)


def _instance_records(
    config: ExperimentConfig, family: str, n: int, levels: int, t: float, index: int
) -> list[ExperimentRecord]:
    seed = instance_seed(config.seed, family, n, levels, t, index)
    spec = _cell_spec(config, family, n, levels, t, seed)

    def record(algorithm, subsolver, cost, opt_cost, ratio, denom, ms, status, m):
        return ExperimentRecord(
            family, n, m, levels, t, seed, algorithm, subsolver,
            cost, opt_cost, ratio, denom, ms, status,
        )

    try:
        inst = build_instance(spec)
    except ValueError:
        rows = []
        if "exact" in config.algorithms and not config.large_graph:
            rows.append(record("exact", "none", None, None, None, "", 0.0, "infeasible", 0))
        for subsolver in config.subsolvers:
            for algorithm in config.algorithms:
                if algorithm == "exact":
                    continue
                rows.append(
                    record(algorithm, subsolver, None, None, None, "", 0.0, "infeasible", 0)
                )
        return rows

    m = inst.graph.m
    rows = []

    opt_cost = None
    if "exact" in config.algorithms and not config.large_graph:
        start = time.perf_counter()
        result = solve_exact(inst, node_limit=config.node_limit)
        ms = (time.perf_counter() - start) * 1000.0
        if result.status == "optimal":
            opt_cost = _validated_cost(inst, result.solution)
            rows.append(
                record("exact", "none", opt_cost, opt_cost, 1.0, "opt", ms, "ok", m)
            )
        elif result.status == "unsolved":
            incumbent = (
                _validated_cost(inst, result.solution)
                if result.solution is not None
                else None
            )
            rows.append(
                record("exact", "none", incumbent, None, None, "", ms, "unsolved", m)
            )
        else:
            rows.append(record("exact", "none", None, None, None, "", ms, "infeasible", m))

    heuristic_algorithms = [a for a in config.algorithms if a != "exact"]
    for subsolver in config.subsolvers:
        runs: dict[str, tuple[float | None, float, str]] = {}
        for algorithm in heuristic_algorithms:
            start = time.perf_counter()
            try:
                if algorithm == "bu":
                    solution = bottom_up(inst, subsolver, node_limit=config.node_limit)
                elif algorithm == "td":
                    solution = top_down(inst, subsolver, node_limit=config.node_limit)
                else:
                    solution, _ = combined(inst, subsolver, node_limit=config.node_limit)
                ms = (time.perf_counter() - start) * 1000.0
                runs[algorithm] = (_validated_cost(inst, solution), ms, "ok")
            except ExactBudgetError:
                ms = (time.perf_counter() - start) * 1000.0
                runs[algorithm] = (None, ms, "unsolved")

        fallback = [
            cost for a, (cost, _, status) in runs.items()
            if a in ("bu", "td") and status == "ok" and cost is not None
        ]
        min_heuristic = min(fallback) if fallback else None

        for algorithm in heuristic_algorithms:
            cost, ms, status = runs[algorithm]
            ratio = None
            denom = ""
            if cost is not None:
                if config.large_graph:
                    if min_heuristic is not None:
                        ratio = cost / min_heuristic
                        denom = "min_heuristic"
                elif opt_cost is not None:
                    ratio = cost / opt_cost
                    denom = "opt"
            rows.append(
                record(algorithm, subsolver, cost, opt_cost if not config.large_graph else None,
                       ratio, denom, ms, status, m)
            )
    return rows


def _task(args) -> list[ExperimentRecord]:
    return _instance_records(*args)


def run_suite(config: ExperimentConfig, out_dir: str | Path) -> list[ExperimentRecord]:
    """Run the whole grid and write results.csv plus aggregates.csv.

    Instance failures become records with a non-ok status; the suite
    itself never aborts on one bad cell. Output row order follows the
    grid regardless of worker scheduling.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [
        (config, family, n, levels, t, index)
        for family, n, levels, t in config.cells()
        for index in range(config.instances_per_cell)
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            chunks = list(pool.map(_task, tasks))
    else:
        chunks = [_task(task) for task in tasks]
    records = [row for chunk in chunks for row in chunk]

    results_path = out / "results.csv"
    with results_path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(rec.row())

    _write_aggregates(records, out / "aggregates.csv")
    return records


def _write_aggregates(records: list[ExperimentRecord], path: Path) -> None:
    """Five-number ratio summaries per parameter value per algorithm."""
    parameters = [
        ("family", lambda r: r.family),
        ("n", lambda r: str(r.n)),
        ("levels", lambda r: str(r.levels)),
        ("t", lambda r: _fmt(r.t)),
    ]
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(AGGREGATE_COLUMNS)
        for name, key in parameters:
            grouped: dict[tuple[str, str, str], list[float]] = {}
            for rec in records:
                if rec.ratio is None:
                    continue
                grouped.setdefault((key(rec), rec.algorithm, rec.subsolver), []).append(
                    rec.ratio
                )
            for (value, algorithm, subsolver), ratios in sorted(grouped.items()):
                writer.writerow(
                    [name, value, algorithm, subsolver, str(len(ratios))]
                    + [_fmt(x) for x in _five_numbers(ratios)]
                )


def _five_numbers(data: list[float]) -> list[float]:
    ordered = sorted(data)
    if len(ordered) == 1:
        x = ordered[0]
        return [x, x, x, x, x]
    q1, median, q3 = statistics.quantiles(ordered, n=4, method="inclusive")
    return [ordered[0], q1, median, q3, ordered[-1]]
