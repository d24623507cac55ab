"""Independent reference computations used as test oracles.

The enumeration oracle fixes every integer combination and solves the remaining
LP with scipy's HiGHS wrapper, so it shares no code with the in-house simplex
or the branch-and-bound tree.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import linprog

from hubopt.compiler import INTEGER, MILPInstance, VariableRef
from hubopt.model import Sense


def mini_hub(seed: int) -> MILPInstance:
    """A one-hour hub with up to three integer-sized converters (0..4 units each) and at most 12 variables.

    Each converter buys input, sells output at a fixed ratio, pays for every
    built unit and is capped per built unit. Shared input supply and output
    demand nodes couple the converters; an optional delivery obligation can
    make the instance infeasible.
    """
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 4))
    inst = MILPInstance()
    units, inputs, outputs = [], [], []
    for i in range(k):
        n = inst.add_variable(VariableRef("units_invested_available", (f"U{i}",), 0), INTEGER,
                              ub=float(rng.integers(1, 5)))
        x = inst.add_variable(VariableRef("unit_flow", ("In", f"U{i}"), 0))
        y = inst.add_variable(VariableRef("unit_flow", (f"U{i}", "Out"), 0))
        units.append(n), inputs.append(x), outputs.append(y)
        cap = float(rng.uniform(0.5, 3.0))
        ratio = float(rng.uniform(0.8, 2.5))
        inst.add_constraint([(y, 1.0), (n, -cap)], Sense.LE, 0.0, f"Eq5:U{i}")
        inst.add_constraint([(x, 1.0), (y, -ratio)], Sense.EQ, 0.0, f"ratio:U{i}")
        if rng.random() < 0.4:
            inst.add_constraint([(y, 1.0), (n, -0.2 * cap)], Sense.GE, 0.0, f"min_op:U{i}")
        inst.add_cost(n, float(rng.uniform(0.5, 6.0)))
        inst.add_cost(x, float(rng.uniform(0.1, 2.0)))
        inst.add_cost(y, -float(rng.uniform(1.0, 6.0)))
    slack = []
    for j in range(int(rng.integers(0, 12 - 3 * k + 1))):
        s = inst.add_variable(VariableRef("node_slack", (f"S{j}",), 0), ub=float(rng.uniform(0.5, 4.0)))
        slack.append(s)
        target = int(rng.integers(0, k))
        inst.add_constraint([(outputs[target], 1.0), (s, -1.0)], Sense.GE, 0.0, f"slack:S{j}")
        inst.add_cost(s, -float(rng.uniform(0.0, 1.0)))
    inst.add_constraint([(x, 1.0) for x in inputs], Sense.LE, float(rng.uniform(1.0, 8.0)), "balance:In")
    inst.add_constraint([(y, 1.0) for y in outputs], Sense.LE, float(rng.uniform(1.0, 8.0)), "balance:Out")
    if rng.random() < 0.3:
        inst.add_constraint([(y, 1.0) for y in outputs], Sense.GE, float(rng.uniform(0.0, 9.0)), "delivery")
    return inst


def enumerate_milp(inst: MILPInstance) -> float:
    """Optimal objective by trying every integer combination (math.inf if infeasible)."""
    form = inst.arrays()
    A = form.A.toarray()
    ints = np.flatnonzero(form.integer)
    ranges = [range(int(math.ceil(form.lb[j])), int(math.floor(form.ub[j])) + 1) for j in ints]
    A_ub = np.vstack([A, -A])
    b_ub = np.concatenate([form.row_hi, -form.row_lo])
    keep = np.isfinite(b_ub)
    best = math.inf
    for combo in itertools.product(*ranges):
        lb, ub = form.lb.copy(), form.ub.copy()
        lb[ints] = ub[ints] = combo
        res = linprog(form.c, A_ub=A_ub[keep], b_ub=b_ub[keep], bounds=list(zip(lb, ub)), method="highs")
        if res.status == 0:
            best = min(best, res.fun + form.c0)
    return best


def lp_oracle(inst: MILPInstance) -> tuple[int, float]:
    """(scipy status, objective) of the continuous relaxation."""
    form = inst.arrays()
    A = form.A.toarray()
    A_ub = np.vstack([A, -A])
    b_ub = np.concatenate([form.row_hi, -form.row_lo])
    keep = np.isfinite(b_ub)
    res = linprog(form.c, A_ub=A_ub[keep], b_ub=b_ub[keep], bounds=list(zip(form.lb, form.ub)), method="highs")
    return res.status, (res.fun + form.c0 if res.status == 0 else math.nan)


def relative_error(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / max(1.0, abs(b))
