from __future__ import annotations

import math
import time

from hubopt.compiler.instance import MILPInstance
from hubopt.solver.audit import check as audit_check
from hubopt.solver.bnb import BranchAndBound
from hubopt.solver.core import Solution, SolverConfig, Status, relative_gap

_TREE_STATUS = {"infeasible": Status.INFEASIBLE, "unbounded": Status.UNBOUNDED}


def solve_milp(instance: MILPInstance, config: SolverConfig | None = None) -> Solution:
    """Branch-and-bound over LP relaxations; an all-continuous instance is a single LP."""
    config = config or SolverConfig()
    t0 = time.perf_counter()
    form = instance.arrays()
    tree = BranchAndBound(form, config).run()
    runtime = time.perf_counter() - t0
    c0 = instance.objective_constant
    if tree.status in _TREE_STATUS:
        return Solution(_TREE_STATUS[tree.status], nodes=tree.nodes, iterations=tree.iterations,
                        runtime=runtime, engine=tree.engine)
    if tree.x is None:
        return Solution(Status.ITERATION_LIMIT, best_bound=tree.bound + c0, nodes=tree.nodes,
                        iterations=tree.iterations, runtime=runtime, engine=tree.engine)
    obj = tree.objective + c0
    bound = tree.bound + c0
    gap = relative_gap(obj, bound, config.absolute_gap)
    status = Status.OPTIMAL if tree.status == "optimal" and gap <= config.relative_gap else Status.GAP_LIMIT
    values = {v.ref: float(x) for v, x in zip(instance.variables, tree.x)}
    sol = Solution(status, values, obj, min(bound, obj), gap, tree.nodes, tree.iterations, runtime, tree.engine)
    if config.audit:
        audit_check(instance, values, config.feasibility_tol, config.integrality_tol)
    return sol


def solve_lp(instance: MILPInstance, config: SolverConfig | None = None) -> Solution:
    """Solve the continuous relaxation (integer domains are ignored)."""
    return solve_milp(instance.relaxed(), config)


def solve(instance: MILPInstance, config: SolverConfig | None = None) -> Solution:
    return solve_milp(instance, config) if instance.n_integer else solve_lp(instance, config)


def is_finite_solution(sol: Solution) -> bool:
    return sol.status.has_values and math.isfinite(sol.objective)
