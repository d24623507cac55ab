"""Command-line entry point: ``hubopt validate | scenarios | compile | solve | report``.

Exit codes: 0 success, 1 diagnostics or dataset/compile errors, 2 solver
failure, 64 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from hubopt.errors import (
    AuditFailure, HuboptError, IoFailure, MissingSolutionValue, NumericalBreakdown, SubprocessFailure,
)

EXIT_OK, EXIT_DIAGNOSTICS, EXIT_SOLVER, EXIT_USAGE = 0, 1, 2, 64
RUN_FILE = "run.json"
SOLUTION_FILE = "solution.sol"
MPS_FILE = "model.mps"
_SOLVER_ERRORS = (AuditFailure, NumericalBreakdown, SubprocessFailure, MissingSolutionValue)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise UsageError(message)


def _dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", help="model CSV (default: bundled hub dataset)")
    p.add_argument("--timeseries", help="directory of hourly series CSVs")


def _scenario_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--stack", required=required, help="built-in scenario (S0..S11, a, b) or layers joined by '+'")
    p.add_argument("--layer", action="append", default=[], help="extra layer appended on top (repeatable)")
    p.add_argument("--capex-factor", type=float, default=0.5, help="multiplier for the derived Opt-CAPEX layer")


def _compile_args(p: argparse.ArgumentParser) -> None:
    _dataset_args(p)
    _scenario_args(p)
    p.add_argument("--horizon", help="optimisation window, e.g. 24h or 168h (default: the model's own)")
    p.add_argument("--mode", choices=("milp", "lp"), default="milp")
    p.add_argument("--candidate-scale", type=float, default=1.0, help="multiply candidate unit counts")
    p.add_argument("--allow-mothball", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hubopt", description="Energy-hub capacity expansion toolchain")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check the dataset (and optionally a stack) for structural errors")
    _dataset_args(p)
    _scenario_args(p, required=False)

    p = sub.add_parser("scenarios", help="show built-in scenario stacks")
    p.add_argument("--list", action="store_true", help="names only")

    p = sub.add_parser("compile", help="compile a stack and write MPS")
    _compile_args(p)
    p.add_argument("--mps", required=True, help="output MPS path (a .tags sidecar is written next to it)")

    p = sub.add_parser("solve", help="compile, solve and write result tables")
    _compile_args(p)
    p.add_argument("--out", required=True, help="result directory")
    p.add_argument("--annualize", action="store_true", help="scale horizon totals to a full year")
    p.add_argument("--time-limit", type=float, help="seconds for branch-and-bound")
    p.add_argument("--relative-gap", type=float, default=1e-4)
    p.add_argument("--engine", choices=("auto", "simplex", "highs"), default="auto", help="LP engine for builtin")
    p.add_argument("--solver", choices=("builtin", "external"), default="builtin")
    p.add_argument("--solver-cmd", help="external command with {mps} and {sol} placeholders")

    p = sub.add_parser("report", help="recompute result tables from a stored solution")
    p.add_argument("--out", required=True, help="directory written by 'hubopt solve'")
    p.add_argument("--annualize", action="store_true", default=None)
    return ap


def _load(args):
    from hubopt.data import GLS_MODEL, GLS_TIMESERIES
    from hubopt.model import load_dataset

    if args.model is None:
        return load_dataset(GLS_MODEL, args.timeseries or GLS_TIMESERIES)
    return load_dataset(args.model, args.timeseries)


def _stack(args):
    from hubopt.scenarios import get_stack

    return get_stack(args.stack, args.layer)


def _compile(args):
    from hubopt.compiler import compile_scenario
    from hubopt.scenarios import check_stack

    graph = _load(args)
    stack = _stack(args)
    problems = [d for d in check_stack(stack) if d.severity == "error"]
    if problems:
        for d in problems:
            print(d, file=sys.stderr)
        return None
    return compile_scenario(graph, stack, args.horizon, args.mode, args.candidate_scale, args.capex_factor,
                            args.allow_mothball)


def cmd_validate(args) -> int:
    from hubopt.model import validate_graph
    from hubopt.model import Diagnostic
    from hubopt.scenarios import DERIVED_LAYERS, check_stack, layer_names

    graph = _load(args)
    diags = list(validate_graph(graph))
    if args.stack:
        stack = _stack(args)
        diags += check_stack(stack)
        diags += [Diagnostic("error", name, "layer is not declared in the dataset")
                  for name in layer_names(stack) if name not in graph.layers and name not in DERIVED_LAYERS]
    for d in sorted(diags):
        print(d)
    errors = sum(d.severity == "error" for d in diags)
    print(f"{errors} error(s), {len(diags) - errors} warning(s)")
    return EXIT_DIAGNOSTICS if errors else EXIT_OK


def cmd_scenarios(args) -> int:
    from hubopt.scenarios import builtin_scenarios

    for name, stack in builtin_scenarios().items():
        print(name if args.list else f"{name}: {' > '.join(stack.layers)}")
    return EXIT_OK


def _summary(inst) -> str:
    return f"{inst.n_vars} variables ({inst.n_integer} integer), {len(inst.constraints)} constraints"


def cmd_compile(args) -> int:
    from hubopt.solver.mps import write_mps

    inst = _compile(args)
    if inst is None:
        return EXIT_DIAGNOSTICS
    write_mps(inst, args.mps, name=inst.metadata.get("scenario") or "HUBOPT")
    print(f"{args.mps}: {_summary(inst)}")
    return EXIT_OK


def _run_record(args) -> dict:
    return {
        "model": args.model, "timeseries": args.timeseries, "stack": args.stack, "layer": args.layer,
        "capex_factor": args.capex_factor, "horizon": args.horizon, "mode": args.mode,
        "candidate_scale": args.candidate_scale, "allow_mothball": args.allow_mothball,
        "annualize": args.annualize,
    }


def _emit(inst, solution, out: Path, annualize: bool) -> None:
    from hubopt.reporting import compute_kpis, emit_results

    report = compute_kpis(inst, solution, annualize)
    emit_results(report, solution, out)
    print(f"status {solution.status}  objective {solution.objective:.6g}  profit {report.profit:.6g}")


def cmd_solve(args) -> int:
    from hubopt.solver import SolverConfig, solve
    from hubopt.solver.external import external_solve, resolve_command
    from hubopt.solver.mps import write_mps
    from hubopt.solver.solfile import write_solution

    inst = _compile(args)
    if inst is None:
        return EXIT_DIAGNOSTICS
    print(_summary(inst))
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / RUN_FILE).write_text(json.dumps(_run_record(args), indent=1, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write to {out}: {exc}") from None
    write_mps(inst, out / MPS_FILE, name=inst.metadata.get("scenario") or "HUBOPT")

    config = SolverConfig(relative_gap=args.relative_gap, time_limit=args.time_limit, lp_engine=args.engine)
    if args.solver == "external":
        solution = external_solve(inst, resolve_command(args.solver_cmd), config, timeout=args.time_limit)
    else:
        solution = solve(inst, config)
    write_solution(solution, out / SOLUTION_FILE, inst)
    if not solution.status.has_values:
        print(f"solver finished without a solution: {solution.status}", file=sys.stderr)
        return EXIT_SOLVER
    _emit(inst, solution, out, args.annualize)
    return EXIT_OK


def cmd_report(args) -> int:
    from hubopt.solver.solfile import read_solution

    out = Path(args.out)
    try:
        record = json.loads((out / RUN_FILE).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise IoFailure(f"cannot read {out / RUN_FILE}: {exc}") from None
    stored = argparse.Namespace(**record)
    inst = _compile(stored)
    if inst is None:
        return EXIT_DIAGNOSTICS
    solution = read_solution(out / SOLUTION_FILE, inst)
    if not solution.status.has_values:
        print(f"stored solution has status {solution.status}", file=sys.stderr)
        return EXIT_SOLVER
    annualize = record["annualize"] if args.annualize is None else args.annualize
    _emit(inst, solution, out, annualize)
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "scenarios": cmd_scenarios, "compile": cmd_compile,
            "solve": cmd_solve, "report": cmd_report}


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError:
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except _SOLVER_ERRORS as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (HuboptError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
