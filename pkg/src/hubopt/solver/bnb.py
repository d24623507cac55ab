"""Best-first branch-and-bound over LP relaxations.

Branching takes the most fractional integer variable (lowest index on ties).
Children are solved eagerly from their parent's basis and queued on their LP
bound. A rounding dive supplies early incumbents; the final incumbent is
polished by re-solving the LP with every integer fixed.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

import numpy as np

from hubopt.solver.core import SolverConfig, relative_gap
from hubopt.solver.simplex import INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED, LPResult, SimplexLP


def make_engine(form, config: SolverConfig):
    engine = config.lp_engine
    if engine == "auto":
        engine = "simplex" if form.A.shape[0] <= config.simplex_max_rows else "highs"
    kw = dict(primal_tol=min(1e-9, config.feasibility_tol * 1e-3), dual_tol=1e-9, pivot_tol=config.pivot_tol)
    if engine == "highs":
        from hubopt.solver.highs import HighsLP

        return HighsLP.from_form(form, **kw), engine
    return SimplexLP.from_form(form, **kw), engine


@dataclass
class TreeResult:
    status: str  # optimal | infeasible | unbounded | limit
    x: np.ndarray | None
    objective: float  # without the constant term
    bound: float
    nodes: int
    iterations: int
    engine: str


def fractionality(x: np.ndarray, integer: np.ndarray) -> np.ndarray:
    f = np.zeros_like(x)
    xi = x[integer]
    f[integer] = np.abs(xi - np.round(xi))
    return f


def branch_variable(x: np.ndarray, integer: np.ndarray, tol: float) -> int | None:
    """Most fractional integer variable; lowest index wins ties."""
    f = fractionality(x, integer)
    if not np.any(f > tol):
        return None
    score = np.round(f, 9)
    return int(np.argmax(score))


class BranchAndBound:
    def __init__(self, form, config: SolverConfig):
        self.form = form
        self.config = config
        self.integer = np.asarray(form.integer, dtype=bool)
        self.lp, self.engine = make_engine(form, config)
        self.incumbent: np.ndarray | None = None
        self.inc_obj = math.inf
        self.iterations = 0
        self.nodes = 0
        self._deadline = math.inf

    # ------------------------------------------------------------------
    def _solve(self, lb, ub, warm=None) -> LPResult:
        res = self.lp.solve(lb, ub, warm)
        self.iterations += res.iterations
        return res

    def _is_integral(self, x: np.ndarray) -> bool:
        return not np.any(fractionality(x, self.integer) > self.config.integrality_tol)

    def _offer(self, x: np.ndarray, obj: float) -> None:
        if obj < self.inc_obj - 1e-12 * max(1.0, abs(obj)):
            x = x.copy()
            x[self.integer] = np.round(x[self.integer])
            self.incumbent, self.inc_obj = x, obj

    def _prune_level(self) -> float:
        if not math.isfinite(self.inc_obj):
            return math.inf
        return self.inc_obj - max(self.config.absolute_gap, self.config.relative_gap * abs(self.inc_obj))

    def _out_of_time(self) -> bool:
        return time.perf_counter() > self._deadline

    # ------------------------------------------------------------------
    def dive(self, lb, ub, res: LPResult, max_rounds: int = 60) -> None:
        """Round and fix the least fractional variables batch by batch until integral or infeasible."""
        lb, ub = lb.copy(), ub.copy()
        for _ in range(max_rounds):
            if res.status != OPTIMAL or res.objective >= self._prune_level() or self._out_of_time():
                return
            f = fractionality(res.x, self.integer)
            frac = np.flatnonzero(f > self.config.integrality_tol)
            if not len(frac):
                self._offer(res.x, res.objective)
                return
            order = frac[np.lexsort((frac, f[frac]))]
            batch = order[: max(1, len(order) // 5)]
            nlb, nub = lb.copy(), ub.copy()
            vals = np.clip(np.round(res.x[batch]), lb[batch], ub[batch])
            nlb[batch] = vals
            nub[batch] = vals
            nxt = self._solve(nlb, nub, res.basis)
            if nxt.status != OPTIMAL and len(batch) > 1:
                j = batch[:1]
                nlb, nub = lb.copy(), ub.copy()
                nlb[j] = nub[j] = np.clip(np.round(res.x[j]), lb[j], ub[j])
                nxt = self._solve(nlb, nub, res.basis)
            if nxt.status != OPTIMAL:
                return
            lb, ub, res = nlb, nub, nxt

    def polish(self) -> None:
        """Re-solve the continuous part with integers fixed at the incumbent."""
        if self.incumbent is None:
            return
        lb, ub = self.form.lb.copy(), self.form.ub.copy()
        fixed = np.round(self.incumbent[self.integer])
        lb[self.integer] = fixed
        ub[self.integer] = fixed
        res = self._solve(lb, ub)
        if res.status == OPTIMAL and res.objective <= self.inc_obj + 1e-9 * max(1.0, abs(self.inc_obj)):
            x = res.x.copy()
            x[self.integer] = fixed
            self.incumbent, self.inc_obj = x, float(self.form.c @ x)

    # ------------------------------------------------------------------
    def run(self) -> TreeResult:
        cfg = self.config
        start = time.perf_counter()
        if cfg.time_limit is not None:
            self._deadline = start + cfg.time_limit
        lb0, ub0 = self.form.lb.copy(), self.form.ub.copy()
        if np.any(self.integer):
            lb0[self.integer] = np.ceil(lb0[self.integer] - cfg.integrality_tol)
            ub0[self.integer] = np.floor(ub0[self.integer] + cfg.integrality_tol)
        root = self._solve(lb0, ub0)
        self.nodes = 1
        if root.status == INFEASIBLE:
            return self._finish("infeasible", math.inf)
        if root.status == UNBOUNDED:
            return self._finish("unbounded", -math.inf)
        if root.status == ITERATION_LIMIT:
            return self._finish("limit", -math.inf)
        if self._is_integral(root.x):
            self._offer(root.x, root.objective)
            self.polish()
            return self._finish("optimal", self.inc_obj)
        if cfg.dive:
            self.dive(lb0, ub0, root)

        counter = 0
        heap = [(root.objective, counter, lb0, ub0, root)]
        status = "optimal"
        while heap:
            bound = heap[0][0]
            if relative_gap(self.inc_obj, bound, cfg.absolute_gap) <= cfg.relative_gap:
                break
            if self._out_of_time() or (cfg.node_limit is not None and self.nodes >= cfg.node_limit):
                status = "limit"
                break
            bound, _, lb, ub, res = heapq.heappop(heap)
            if bound >= self._prune_level():
                continue
            j = branch_variable(res.x, self.integer, cfg.integrality_tol)
            if j is None:  # integral nodes are never queued, but keep the tree sound
                self._offer(res.x, res.objective)
                continue
            v = res.x[j]
            for side in (0, 1):
                clb, cub = lb.copy(), ub.copy()
                if side == 0:
                    cub[j] = math.floor(v)
                else:
                    clb[j] = math.ceil(v)
                if clb[j] > cub[j]:
                    continue
                child = self._solve(clb, cub, res.basis)
                self.nodes += 1
                if child.status == UNBOUNDED:
                    return self._finish("unbounded", -math.inf)
                if child.status != OPTIMAL or child.objective >= self._prune_level():
                    continue
                if self._is_integral(child.x):
                    self._offer(child.x, child.objective)
                    continue
                counter += 1
                heapq.heappush(heap, (child.objective, counter, clb, cub, child))
                if cfg.dive and self.incumbent is None and counter % 50 == 0:
                    self.dive(clb, cub, child)
        bound = min(self.inc_obj, heap[0][0]) if heap else self.inc_obj
        if status == "limit":
            bound = min(bound, min((h[0] for h in heap), default=bound))
        self.polish()
        if self.incumbent is None:
            return self._finish("infeasible" if status == "optimal" else "limit", bound)
        return self._finish(status, min(bound, self.inc_obj))

    def _finish(self, status: str, bound: float) -> TreeResult:
        return TreeResult(status, self.incumbent, self.inc_obj, bound, self.nodes, self.iterations, self.engine)
