"""Command-line interface: solve single SyGuS files and run the benchmark
comparison harness.

Exit codes for ``solve``: 0 on success, 1 when synthesis fails, 2 on
usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .pipeline import PipelineConfig, SynthesisResult, run
from .sexpr import SexprError
from .solver import BUILTIN, ExternalSolverError, SolveBudget, SolverChoice
from .stitch import RecursiveSolution
from .sygus import SygusError, parse_problem, print_solution
from .terms import print_term


def _parse_solver(value: str) -> SolverChoice:
    if value == "builtin":
        return BUILTIN
    if value.startswith("external:"):
        return SolverChoice.external(value.split(":", 1)[1])
    raise argparse.ArgumentTypeError("expected 'builtin' or 'external:<path>'")


def _parse_order(value: str):
    if value in ("given", "reversed"):
        return value, 0
    if value.startswith("random:"):
        try:
            return "random", int(value.split(":", 1)[1])
        except ValueError:
            raise argparse.ArgumentTypeError("expected 'random:<seed>'")
    raise argparse.ArgumentTypeError("expected 'given', 'reversed', or 'random:<seed>'")


def _add_common_flags(parser):
    parser.add_argument(
        "--solver",
        type=_parse_solver,
        default=BUILTIN,
        metavar="builtin|external:<path>",
        help="PBE backend (default: builtin)",
    )
    parser.add_argument("--timeout", type=float, default=60.0, metavar="<sec>", help="global wall timeout")
    parser.add_argument(
        "--subset-timeout", type=float, default=10.0, metavar="<sec>", help="per-subset solve timeout"
    )
    parser.add_argument(
        "--fuel", type=int, default=100000, metavar="<n>", help="evaluation fuel for recursive calls"
    )
    parser.add_argument(
        "--order",
        type=_parse_order,
        default=("given", 0),
        metavar="given|reversed|random:<seed>",
        help="constraint processing order",
    )
    parser.add_argument(
        "--no-fallback", action="store_true", help="disable the whole-problem direct solve fallback"
    )
    parser.add_argument(
        "--prefer",
        choices=("direct", "recursive"),
        default="recursive",
        help="which solution kind to prefer when both exist",
    )


def _config_from_args(args) -> PipelineConfig:
    order, seed = args.order
    per_solve = min(args.subset_timeout, args.timeout)
    return PipelineConfig(
        solver=args.solver,
        subset_budget=SolveBudget(timeout=per_solve),
        loop_budget=SolveBudget(timeout=per_solve, max_size=60),
        timeout=args.timeout,
        fuel=args.fuel,
        order=order,
        seed=seed,
        fallback=not args.no_fallback,
        prefer=args.prefer,
    )


def _result_payload(result: SynthesisResult, problem) -> dict:
    stats = {
        "subsets_solved": result.stats.subsets_solved,
        "categories_formed": result.stats.categories_formed,
        "loop_synth_attempts": result.stats.loop_synth_attempts,
        "wall_time_s": round(result.stats.wall_time, 4),
        "solution_size": result.stats.solution_size,
    }
    if not result.ok:
        return {"status": "failure", "reason": result.failure, "stats": stats}
    payload = {"status": "ok", "kind": result.kind, "stats": stats}
    if isinstance(result.outcome, RecursiveSolution):
        payload["smtlib"] = print_solution(result.outcome)
        payload["loop_count"] = print_term(result.outcome.loop_count)
    else:
        payload["smtlib"] = print_solution(result.outcome.term, problem.target)
    return payload


def _cmd_solve(args) -> int:
    try:
        text = Path(args.file).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        problem = parse_problem(text)
    except (SexprError, SygusError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    try:
        config = _config_from_args(args)
    except (ValueError, ExternalSolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    result = run(problem, config)
    if args.emit == "json":
        print(json.dumps(_result_payload(result, problem), indent=2))
    elif result.ok:
        if isinstance(result.outcome, RecursiveSolution):
            print(print_solution(result.outcome))
        else:
            print(print_solution(result.outcome.term, problem.target))
    else:
        print(f"failure: {result.failure}", file=sys.stderr)
    return 0 if result.ok else 1


def _cmd_bench(args) -> int:
    from .report import render_table, run_bench_dir, write_report

    directory = Path(args.dir)
    if not directory.is_dir():
        print(f"error: not a directory: {directory}", file=sys.stderr)
        return 2
    if not sorted(directory.glob("*.sl")):
        print(f"error: no .sl files in {directory}", file=sys.stderr)
        return 2
    try:
        config = _config_from_args(args)
    except (ValueError, ExternalSolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        rows = run_bench_dir(directory, config)
    except (SexprError, SygusError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    print(render_table(rows))
    paths = write_report(rows, args.out)
    print(f"\nwrote {paths['csv']}")
    for p in paths["figures"]:
        print(f"wrote {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loopstitch",
        description="Synthesize recursive string programs from input-output examples.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one SyGuS file")
    solve.add_argument("file", help="a .sl problem file")
    _add_common_flags(solve)
    solve.add_argument(
        "--emit", choices=("smtlib", "json"), default="smtlib", help="output format"
    )
    solve.set_defaults(func=_cmd_solve)

    bench = sub.add_parser("bench", help="run every .sl file in a directory against the baseline")
    bench.add_argument("dir", help="directory of .sl benchmark files")
    _add_common_flags(bench)
    bench.add_argument(
        "--out", default="bench-report", metavar="<dir>", help="where to write the CSV and figures"
    )
    bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
