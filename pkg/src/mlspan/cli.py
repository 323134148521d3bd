"""Command line front end.

Subcommands: generate, heuristic, exact, verify, emit-lp, experiment.
Exit codes: 0 success, 1 failed verification or infeasible input, 2
usage errors, 3 exact solve hit its node limit.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .exact import ExactBudgetError, brute_force_oracle, solve_exact
from .experiment import parse_config, run_suite
from .generate import GeneratorSpec, build_instance
from .ilp import build_mlgs_model, build_pairwise_model, emit_lp_text, reduce_instance
from .instance_io import (
    InstanceFormatError,
    parse_instance,
    parse_solution,
    serialize_instance,
    serialize_solution,
)
from .multilevel import bottom_up, combined, solution_cost, top_down, validate_mlgs

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_UNSOLVED = 3


def _read_instance(path: str):
    try:
        return parse_instance(Path(path).read_text())
    except FileNotFoundError:
        raise SystemExit(_fail(f"no such file: {path}"))
    except InstanceFormatError as exc:
        raise SystemExit(_fail(f"{path}: {exc}"))


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_FAILED


def _cmd_generate(args) -> int:
    kwargs = {}
    if args.family == "erdos_renyi":
        if args.eps is None:
            print("error: --eps is required for erdos_renyi", file=sys.stderr)
            return EXIT_USAGE
        kwargs["eps"] = args.eps
    else:
        if args.k is None:
            print("error: --k is required for watts_strogatz", file=sys.stderr)
            return EXIT_USAGE
        kwargs["k"] = args.k
        kwargs["beta"] = args.beta
    try:
        spec = GeneratorSpec(
            args.family, args.n, args.levels, args.stretch, args.seed, **kwargs
        )
        inst = build_instance(spec)
    except ValueError as exc:
        return _fail(str(exc))
    text = "\n".join(spec.provenance()) + "\n" + serialize_instance(inst)
    Path(args.output).write_text(text)
    print(f"wrote {args.output}: n={inst.graph.n} m={inst.graph.m} levels={inst.levels}")
    return EXIT_OK


def _cmd_heuristic(args) -> int:
    inst = _read_instance(args.instance)
    try:
        if args.algo == "bu":
            solution = bottom_up(inst, args.subsolver, node_limit=args.node_limit)
        elif args.algo == "td":
            solution = top_down(inst, args.subsolver, node_limit=args.node_limit)
        else:
            solution, picked = combined(inst, args.subsolver, node_limit=args.node_limit)
    except ValueError as exc:
        return _fail(str(exc))
    except ExactBudgetError as exc:
        print(f"unsolved: {exc}", file=sys.stderr)
        return EXIT_UNSOLVED
    cost = solution_cost(inst, solution)
    out = args.output or args.instance + ".solution"
    Path(out).write_text(serialize_solution(solution))
    if args.algo == "min":
        print(f"cost {cost:g} ({picked})")
    else:
        print(f"cost {cost:g}")
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_exact(args) -> int:
    inst = _read_instance(args.instance)
    if args.brute_force:
        try:
            result = brute_force_oracle(inst)
        except ValueError as exc:
            return _fail(str(exc))
    else:
        result = solve_exact(inst, node_limit=args.node_limit)
    if result.status == "infeasible":
        return _fail("instance is infeasible: level 1 terminals are disconnected")
    if result.status == "unsolved":
        print("unsolved")
        if result.objective is not None:
            print(f"best known {result.objective:g}", file=sys.stderr)
        return EXIT_UNSOLVED
    print(f"optimum {result.objective:g}")
    if args.output:
        Path(args.output).write_text(serialize_solution(result.solution))
        print(f"wrote {args.output}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    inst = _read_instance(args.instance)
    try:
        solution = parse_solution(Path(args.solution).read_text())
    except FileNotFoundError:
        return _fail(f"no such file: {args.solution}")
    except InstanceFormatError as exc:
        return _fail(f"{args.solution}: {exc}")
    try:
        violations = validate_mlgs(inst, solution)
    except ValueError as exc:
        return _fail(str(exc))
    if not violations:
        print(f"ok: cost {solution_cost(inst, solution):g}")
        return EXIT_OK
    for v in violations:
        print(
            f"level {v.level}: pair ({v.u}, {v.v}) has distance "
            f"{v.subgraph_distance:g}, allowed {v.allowed:g}"
        )
    print(f"{len(violations)} violation(s)", file=sys.stderr)
    return EXIT_FAILED


def _cmd_emit_lp(args) -> int:
    inst = _read_instance(args.instance)
    g = inst.graph
    terminals = sorted(inst.terminal_set(1))
    pairs = [
        (terminals[i], terminals[j])
        for i in range(len(terminals))
        for j in range(i + 1, len(terminals))
    ]
    fixings = None
    if args.reduce:
        g, fixings = reduce_instance(g, pairs, inst.stretch)
        if fixings.deleted_edges:
            inst = type(inst)(g, inst.terminals, inst.stretch)
    try:
        if args.pairwise:
            model = build_pairwise_model(g, pairs, inst.stretch, fixings=fixings)
        else:
            model = build_mlgs_model(inst, fixings=fixings)
    except ValueError as exc:
        return _fail(str(exc))
    Path(args.output).write_text(emit_lp_text(model))
    print(f"wrote {args.output}: {len(model.variables)} variables, "
          f"{len(model.constraints)} constraints")
    if args.reduce:
        sidecar = args.output + ".fixings"
        Path(sidecar).write_text(_fixings_text(fixings))
        print(f"wrote {sidecar}")
    return EXIT_OK


def _fixings_text(fixings) -> str:
    lines = []
    for u, v in sorted(fixings.deleted_edges):
        lines.append(f"deleted_edge {u} {v}")
    for (u, v), (s, d) in sorted(fixings.zero_arcs):
        lines.append(f"zero_arc {u} {v} {s} {d}")
    for (u, v), (s, d) in sorted(fixings.one_arcs):
        lines.append(f"one_arc {u} {v} {s} {d}")
    for u, v in sorted(fixings.one_edges):
        lines.append(f"one_edge {u} {v}")
    return "\n".join(lines) + ("\n" if lines else "")


def _cmd_experiment(args) -> int:
    try:
        config = parse_config(Path(args.config).read_text())
    except FileNotFoundError:
        return _fail(f"no such file: {args.config}")
    except (ValueError, TypeError) as exc:
        return _fail(f"{args.config}: {exc}")
    records = run_suite(config, args.output)
    ok = sum(1 for r in records if r.status == "ok")
    print(f"{len(records)} records ({ok} ok) -> {args.output}/results.csv")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlspan",
        description="Multi-level graph spanners: heuristics, exact solving, "
        "model emission, and experiments.",
    )
    parser.add_argument("--version", action="version", version=f"mlspan {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random instance file")
    p.add_argument("--family", choices=["erdos_renyi", "watts_strogatz"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, help="edge probability margin (erdos_renyi)")
    p.add_argument("--k", type=int, help="lattice degree (watts_strogatz)")
    p.add_argument("--beta", type=float, default=0.2, help="rewiring probability")
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--stretch", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("heuristic", help="run an approximation algorithm")
    p.add_argument("--algo", choices=["bu", "td", "min"], required=True)
    p.add_argument("--subsolver", choices=["heuristic", "exact"], default="heuristic")
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("instance")
    p.add_argument("-o", "--output", help="solution file (default: INSTANCE.solution)")
    p.set_defaults(func=_cmd_heuristic)

    p = sub.add_parser("exact", help="prove an optimal grading")
    p.add_argument("instance")
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--brute-force", action="store_true",
                   help="use the enumeration oracle instead of branch and bound")
    p.add_argument("-o", "--output", help="write the optimal solution here")
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("verify", help="validate a graded solution file")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("emit-lp", help="write the integer program as LP text")
    p.add_argument("instance")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--pairwise", action="store_true",
                   help="emit the single-level pairwise model over level 1 terminals")
    p.add_argument("--reduce", action="store_true",
                   help="apply size reduction first and write a fixings sidecar")
    p.set_defaults(func=_cmd_emit_lp)

    p = sub.add_parser("experiment", help="run a parameter grid and emit CSV")
    p.add_argument("config")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_experiment)

    return parser


def _exit_code(exc: SystemExit) -> int:
    if isinstance(exc.code, int):
        return exc.code
    return EXIT_OK if exc.code is None else EXIT_FAILED


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return _exit_code(exc)
    try:
        return args.func(args)
    except SystemExit as exc:
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
