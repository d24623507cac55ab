"""Stand-alone MPS solver bridge: ``python -m hubopt.solver.highs_cli model.mps model.sol``.

Runs HiGHS' own MILP solver and writes the solution in the plain
``name value`` format with ``# status`` and ``# objective`` headers.
"""

from __future__ import annotations

import argparse
import sys

import highspy

from hubopt.solver.mps import fmt_number

_STATUS = {
    highspy.HighsModelStatus.kOptimal: "Optimal",
    highspy.HighsModelStatus.kInfeasible: "Infeasible",
    highspy.HighsModelStatus.kUnbounded: "Unbounded",
    highspy.HighsModelStatus.kUnboundedOrInfeasible: "Infeasible",
    highspy.HighsModelStatus.kTimeLimit: "GapLimit",
    highspy.HighsModelStatus.kSolutionLimit: "GapLimit",
    highspy.HighsModelStatus.kIterationLimit: "IterationLimit",
}


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="hubopt-highs")
    ap.add_argument("mps")
    ap.add_argument("sol")
    ap.add_argument("--mip-rel-gap", type=float, default=1e-9)
    ap.add_argument("--time-limit", type=float, default=None)
    args = ap.parse_args(argv)

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", 1)
    h.setOptionValue("mip_rel_gap", args.mip_rel_gap)
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)
    h.setOptionValue("mip_feasibility_tolerance", 1e-9)
    if args.time_limit:
        h.setOptionValue("time_limit", args.time_limit)
    if h.readModel(args.mps) == highspy.HighsStatus.kError:
        print(f"cannot read {args.mps}", file=sys.stderr)
        return 3
    h.run()
    status = _STATUS.get(h.getModelStatus(), "IterationLimit")
    lines = [f"# status {status}"]
    if status in ("Optimal", "GapLimit") and h.getInfo().primal_solution_status == 2:
        lines.append(f"# objective {fmt_number(h.getInfo().objective_function_value)}")
        names = h.getLp().col_names_
        values = h.getSolution().col_value
        lines += [f"{n} {fmt_number(v)}" for n, v in zip(names, values)]
    elif status in ("Optimal", "GapLimit"):
        lines[0] = "# status IterationLimit"
    with open(args.sol, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
