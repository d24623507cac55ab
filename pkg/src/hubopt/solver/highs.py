"""HiGHS dual simplex behind the same ``solve(lb, ub, warm)`` interface as :class:`SimplexLP`."""

from __future__ import annotations

import highspy
import numpy as np
from scipy import sparse

from hubopt.solver.simplex import INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED, LPResult

_STATUS = {
    highspy.HighsModelStatus.kOptimal: OPTIMAL,
    highspy.HighsModelStatus.kInfeasible: INFEASIBLE,
    highspy.HighsModelStatus.kUnbounded: UNBOUNDED,
    highspy.HighsModelStatus.kUnboundedOrInfeasible: INFEASIBLE,
    highspy.HighsModelStatus.kIterationLimit: ITERATION_LIMIT,
    highspy.HighsModelStatus.kTimeLimit: ITERATION_LIMIT,
}


class HighsLP:
    def __init__(self, A, row_lo, row_hi, c, lb, ub, primal_tol: float = 1e-9, dual_tol: float = 1e-9,
                 pivot_tol: float = 1e-9, max_iterations: int | None = None):
        A = sparse.csc_matrix(A, dtype=float)
        self.m, self.n = A.shape
        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        h.setOptionValue("solver", "simplex")
        h.setOptionValue("threads", 1)
        h.setOptionValue("primal_feasibility_tolerance", primal_tol)
        h.setOptionValue("dual_feasibility_tolerance", dual_tol)
        if max_iterations:
            h.setOptionValue("simplex_iteration_limit", int(max_iterations))
        self.inf = h.inf
        lp = highspy.HighsLp()
        lp.num_col_ = self.n
        lp.num_row_ = self.m
        lp.col_cost_ = np.asarray(c, dtype=float)
        lp.col_lower_ = self._clip(lb)
        lp.col_upper_ = self._clip(ub)
        lp.row_lower_ = self._clip(row_lo)
        lp.row_upper_ = self._clip(row_hi)
        lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
        lp.a_matrix_.start_ = A.indptr.astype(np.int32)
        lp.a_matrix_.index_ = A.indices.astype(np.int32)
        lp.a_matrix_.value_ = A.data
        h.passModel(lp)
        self.h = h
        self.c = np.asarray(c, dtype=float)
        self.lb = np.asarray(lb, dtype=float)
        self.ub = np.asarray(ub, dtype=float)
        self._idx = np.arange(self.n, dtype=np.int32)

    @classmethod
    def from_form(cls, form, **kw) -> "HighsLP":
        return cls(form.A, form.row_lo, form.row_hi, form.c, form.lb, form.ub, **kw)

    def _clip(self, v) -> np.ndarray:
        return np.clip(np.asarray(v, dtype=float), -self.inf, self.inf)

    def solve(self, lb=None, ub=None, warm=None) -> LPResult:
        lb = self.lb if lb is None else np.asarray(lb, dtype=float)
        ub = self.ub if ub is None else np.asarray(ub, dtype=float)
        if np.any(lb > ub):
            return LPResult(INFEASIBLE)
        h = self.h
        if self.n:
            h.changeColsBounds(self.n, self._idx, self._clip(lb), self._clip(ub))
        if warm is not None:
            h.setBasis(warm)
        else:
            h.clearSolver()
        h.run()
        status = _STATUS.get(h.getModelStatus(), ITERATION_LIMIT)
        iters = int(h.getInfo().simplex_iteration_count)
        if status != OPTIMAL:
            return LPResult(status, iterations=iters, warm=warm is not None)
        sol = h.getSolution()
        x = np.clip(np.array(sol.col_value, dtype=float), lb, ub)
        return LPResult(OPTIMAL, x, float(self.c @ x), h.getBasis(), iters, warm is not None,
                        np.array(sol.row_dual, dtype=float))
