"""Bounded revised simplex with an LU-factored basis and product-form updates.

Rows ``lo <= A x <= hi`` become ``A x - s = 0`` with bounded logicals ``s``.
Phase 1 adds one artificial per violated row (column ``+e_i``) and drives the
artificials to zero; phase 2 then fixes them at zero. A dual simplex restarts
from a supplied basis after bound changes, which is how branch-and-bound
children are warm-started.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from hubopt.errors import NumericalBreakdown

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"

REFACTOR_EVERY = 64
BLAND_AFTER = 40  # consecutive degenerate pivots before switching to Bland's rule
HARRIS_PIVOT = 1e-7  # smallest |alpha| a ratio-test candidate may have


@dataclass
class Basis:
    """Basic column indices (structurals and logicals only) and the at-upper flags of nonbasics."""

    basic: np.ndarray
    at_upper: np.ndarray


@dataclass
class LPResult:
    status: str
    x: np.ndarray | None = None
    objective: float = np.nan
    basis: Basis | None = None
    iterations: int = 0
    warm: bool = False
    duals: np.ndarray | None = field(default=None, repr=False)


class _Factor:
    def __init__(self, K: sparse.csc_matrix, basic: np.ndarray, pivot_tol: float):
        B = K[:, basic].tocsc()
        try:
            self.lu = splu(B, permc_spec="COLAMD", diag_pivot_thresh=0.1)
        except RuntimeError as exc:  # exactly singular
            raise NumericalBreakdown(f"singular basis: {exc}") from None
        self.etas: list[tuple[int, np.ndarray]] = []
        self.pivot_tol = pivot_tol

    def ftran(self, v: np.ndarray) -> np.ndarray:
        w = self.lu.solve(v)
        for r, a in self.etas:
            wr = w[r] / a[r]
            if wr != 0.0:
                w -= a * wr
            w[r] = wr
        return w

    def btran(self, v: np.ndarray) -> np.ndarray:
        w = np.array(v, dtype=float)
        for r, a in reversed(self.etas):
            w[r] = (w[r] - (a @ w - a[r] * w[r])) / a[r]
        return self.lu.solve(w, trans="T")

    def update(self, r: int, alpha: np.ndarray) -> None:
        self.etas.append((r, alpha.copy()))


class SimplexLP:
    """An LP ``min c x  s.t.  row_lo <= A x <= row_hi,  lb <= x <= ub`` solved repeatedly under bound changes."""

    def __init__(self, A, row_lo, row_hi, c, lb, ub, primal_tol: float = 1e-9, dual_tol: float = 1e-9,
                 pivot_tol: float = 1e-9, max_iterations: int | None = None):
        A = sparse.csc_matrix(A, dtype=float)
        self.m, self.n = A.shape
        m, n = self.m, self.n
        eye = sparse.identity(m, format="csc")
        self.K = sparse.hstack([A, -eye, eye], format="csc")
        self.KT = self.K.T.tocsr()
        self.N = n + 2 * m
        self.c = np.asarray(c, dtype=float)
        self.lb = np.asarray(lb, dtype=float)
        self.ub = np.asarray(ub, dtype=float)
        self.row_lo = np.asarray(row_lo, dtype=float)
        self.row_hi = np.asarray(row_hi, dtype=float)
        self.primal_tol = primal_tol
        self.dual_tol = dual_tol
        self.pivot_tol = pivot_tol
        self.max_iterations = max_iterations or 20 * (m + n) + 5000
        self._indptr, self._indices, self._data = self.K.indptr, self.K.indices, self.K.data

    @classmethod
    def from_form(cls, form, **kw) -> "SimplexLP":
        return cls(form.A, form.row_lo, form.row_hi, form.c, form.lb, form.ub, **kw)

    def column(self, j: int) -> np.ndarray:
        v = np.zeros(self.m)
        s, e = self._indptr[j], self._indptr[j + 1]
        v[self._indices[s:e]] = self._data[s:e]
        return v

    # ------------------------------------------------------------------
    def solve(self, lb=None, ub=None, warm: Basis | None = None) -> LPResult:
        lb = self.lb if lb is None else np.asarray(lb, dtype=float)
        ub = self.ub if ub is None else np.asarray(ub, dtype=float)
        if np.any(lb > ub + self.primal_tol):
            return LPResult(INFEASIBLE)
        run = _Run(self, lb, ub)
        if warm is not None:
            try:
                res = run.warm_start(warm)
                if res is not None:
                    return res
            except NumericalBreakdown:
                pass
            run = _Run(self, lb, ub)
        return run.cold_start()


class _Run:
    """Working state of a single solve."""

    def __init__(self, lp: SimplexLP, lb: np.ndarray, ub: np.ndarray):
        self.lp = lp
        m = lp.m
        self.lo = np.concatenate([lb, lp.row_lo, np.zeros(m)])
        self.hi = np.concatenate([ub, lp.row_hi, np.zeros(m)])
        self.cost = np.concatenate([lp.c, np.zeros(2 * m)])
        self.x = np.zeros(lp.N)
        self.row_of = -np.ones(lp.N, dtype=np.int64)
        self.basic = np.zeros(m, dtype=np.int64)
        self.factor: _Factor | None = None
        self.iterations = 0

    # -- basis bookkeeping ------------------------------------------------
    def _set_basis(self, basic: np.ndarray) -> None:
        self.basic = np.asarray(basic, dtype=np.int64).copy()
        self.row_of[:] = -1
        self.row_of[self.basic] = np.arange(len(self.basic))
        self.refactor()

    def refactor(self) -> None:
        lp = self.lp
        self.factor = _Factor(lp.K, self.basic, lp.pivot_tol)
        nonbasic = self.row_of < 0
        xn = np.where(nonbasic, self.x, 0.0)
        self.x[self.basic] = self.factor.ftran(-(lp.K @ xn))

    def _park_nonbasic(self, at_upper: np.ndarray | None = None) -> None:
        lo, hi = self.lo, self.hi
        nb = self.row_of < 0
        val = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))
        if at_upper is not None:
            val = np.where(at_upper & np.isfinite(hi), hi, val)
        self.x[nb] = val[nb]

    def duals(self, cost: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        y = self.factor.btran(cost[self.basic])
        d = cost - self.lp.KT @ y
        d[self.basic] = 0.0
        return y, d

    def _pivot(self, q: int, r: int, alpha: np.ndarray) -> None:
        leaving = self.basic[r]
        self.row_of[leaving] = -1
        self.basic[r] = q
        self.row_of[q] = r
        self.factor.update(r, alpha)
        if len(self.factor.etas) >= REFACTOR_EVERY:
            self.refactor()

    def infeasibility(self) -> float:
        xb = self.x[self.basic]
        lo, hi = self.lo[self.basic], self.hi[self.basic]
        return float(np.max(np.maximum(lo - xb, xb - hi), initial=0.0))

    # -- starts -----------------------------------------------------------
    def cold_start(self) -> LPResult:
        lp = self.lp
        m, n = lp.m, lp.n
        self.row_of[:] = -1
        self._park_nonbasic()
        act = lp.K[:, :n] @ self.x[:n]
        slack_lo, slack_hi = self.lo[n:n + m], self.hi[n:n + m]
        basic = np.arange(n, n + m)
        phase1 = np.zeros(lp.N)
        for i in range(m):
            if slack_lo[i] - lp.primal_tol <= act[i] <= slack_hi[i] + lp.primal_tol:
                continue
            target = slack_lo[i] if act[i] < slack_lo[i] else slack_hi[i]
            self.x[n + i] = target
            a = n + m + i
            basic[i] = a
            if target - act[i] > 0:  # artificial = s - A x
                self.hi[a], phase1[a] = np.inf, 1.0
            else:
                self.lo[a], phase1[a] = -np.inf, -1.0
        self._set_basis(basic)
        if phase1.any():
            status = self.primal(phase1)
            if status == ITERATION_LIMIT:
                return LPResult(ITERATION_LIMIT, iterations=self.iterations)
            if float(phase1 @ self.x) > lp.primal_tol * max(1.0, m) ** 0.5:
                return LPResult(INFEASIBLE, iterations=self.iterations)
            arts = slice(n + m, n + 2 * m)
            self.lo[arts] = 0.0
            self.hi[arts] = 0.0
            self.x[n + m:][self.row_of[n + m:] < 0] = 0.0
            self.refactor()
        status = self.primal(self.cost)
        return self._result(status, warm=False)

    def warm_start(self, warm: Basis) -> LPResult | None:
        self._set_basis_from(warm)
        lp = self.lp
        _, d = self.duals(self.cost)
        nb = self.row_of < 0
        free_move = nb & (self.lo < self.hi)
        at_lo = free_move & np.isclose(self.x, self.lo)
        at_hi = free_move & ~at_lo & np.isclose(self.x, self.hi)
        free = free_move & ~at_lo & ~at_hi
        bad = (at_lo & (d < -lp.dual_tol)) | (at_hi & (d > lp.dual_tol)) | (free & (np.abs(d) > lp.dual_tol))
        if bad.any():
            if self.infeasibility() <= lp.primal_tol:
                return self._result(self.primal(self.cost), warm=True)
            return None
        status = self.dual()
        if status != OPTIMAL:
            return self._result(status, warm=True) if status == INFEASIBLE else None
        return self._result(self.primal(self.cost), warm=True)

    def _set_basis_from(self, warm: Basis) -> None:
        lp = self.lp
        basic = np.asarray(warm.basic, dtype=np.int64)
        if len(basic) != lp.m or np.any(basic >= lp.n + lp.m):
            raise NumericalBreakdown("warm basis does not fit this problem")
        self.row_of[:] = -1
        self.row_of[basic] = np.arange(lp.m)
        flags = np.zeros(lp.N, dtype=bool)
        flags[:len(warm.at_upper)] = np.asarray(warm.at_upper, dtype=bool)
        self._park_nonbasic(flags)
        self._set_basis(basic)

    # -- primal simplex ---------------------------------------------------
    def primal(self, cost: np.ndarray) -> str:
        lp = self.lp
        tol_d, tol_p, piv = lp.dual_tol, lp.primal_tol, lp.pivot_tol
        degenerate = 0
        retried = False
        while True:
            if self.iterations >= lp.max_iterations:
                return ITERATION_LIMIT
            _, d = self.duals(cost)
            nb = self.row_of < 0
            movable = nb & (self.lo < self.hi)
            can_up = movable & (self.x < self.hi - tol_p) & (d < -tol_d)
            can_down = movable & (self.x > self.lo + tol_p) & (d > tol_d)
            eligible = can_up | can_down
            if not eligible.any():
                return OPTIMAL
            if degenerate >= BLAND_AFTER:
                q = int(np.flatnonzero(eligible)[0])
            else:
                score = np.where(eligible, np.abs(d), -1.0)
                q = int(np.argmax(score))
            direction = 1.0 if can_up[q] else -1.0
            alpha = self.factor.ftran(lp.column(q))

            # ratio test: basics move by -direction * alpha * theta
            xb = self.x[self.basic]
            lo_b, hi_b = self.lo[self.basic], self.hi[self.basic]
            step = direction * alpha
            dec = step > HARRIS_PIVOT
            inc = step < -HARRIS_PIVOT
            dist = np.full(lp.m, np.inf)
            dist[dec] = np.maximum(xb[dec] - lo_b[dec], 0.0)
            dist[inc] = np.maximum(hi_b[inc] - xb[inc], 0.0)
            mag = np.abs(step)
            cand = dec | inc
            # Harris pass 1: loosest step keeping every basic within tol of its bound
            bound = float(np.min((dist[cand] + tol_p) / mag[cand])) if cand.any() else np.inf
            flip = self.hi[q] - self.lo[q]
            if flip <= bound:
                if not np.isfinite(flip):
                    if not retried:
                        retried = True
                        self.refactor()
                        continue
                    return UNBOUNDED
                self.x[q] += direction * flip
                self.x[self.basic] = xb - step * flip
                self.iterations += 1
                degenerate = 0
                continue
            retried = False
            theta = np.where(cand, dist / np.where(cand, mag, 1.0), np.inf)
            ties = np.flatnonzero(cand & (theta <= bound))
            if degenerate >= BLAND_AFTER:
                r = int(ties[np.argmin(self.basic[ties])])
            else:
                r = int(ties[np.argmax(mag[ties])])
            t_min = float(theta[r])
            if abs(alpha[r]) < piv:
                raise NumericalBreakdown(f"pivot {alpha[r]:.3g} below tolerance with no alternative")
            leaving = self.basic[r]
            self.x[self.basic] = xb - step * t_min
            self.x[q] += direction * t_min
            # snap the leaving variable onto the bound it hit
            self.x[leaving] = self.lo[leaving] if step[r] > 0 else self.hi[leaving]
            degenerate = degenerate + 1 if t_min <= tol_p else 0
            self._pivot(q, r, alpha)
            self.iterations += 1

    # -- dual simplex -----------------------------------------------------
    def dual(self) -> str:
        lp = self.lp
        tol_p, piv = lp.primal_tol, lp.pivot_tol
        while True:
            if self.iterations >= lp.max_iterations:
                return ITERATION_LIMIT
            xb = self.x[self.basic]
            lo_b, hi_b = self.lo[self.basic], self.hi[self.basic]
            below = lo_b - xb
            above = xb - hi_b
            viol = np.maximum(below, above)
            r = int(np.argmax(viol)) if lp.m else 0
            if not lp.m or viol[r] <= tol_p:
                return OPTIMAL
            to_lower = below[r] > above[r]
            target = lo_b[r] if to_lower else hi_b[r]
            rho = self.factor.btran(np.eye(1, lp.m, r).ravel())
            alpha_r = lp.KT @ rho
            _, d = self.duals(self.cost)
            nb = (self.row_of < 0) & (self.lo < self.hi)
            at_hi = nb & np.isfinite(self.hi) & (self.x >= self.hi - tol_p) & ~(np.isfinite(self.lo) & (self.x <= self.lo + tol_p))
            at_lo = nb & ~at_hi & np.isfinite(self.lo)
            free = nb & ~at_hi & ~at_lo
            if to_lower:  # x_r must increase: need alpha_rj * dx_j < 0
                ok = (at_lo & (alpha_r < -HARRIS_PIVOT)) | (at_hi & (alpha_r > HARRIS_PIVOT))
            else:
                ok = (at_lo & (alpha_r > HARRIS_PIVOT)) | (at_hi & (alpha_r < -HARRIS_PIVOT))
            ok |= free & (np.abs(alpha_r) > HARRIS_PIVOT)
            if not ok.any():
                return INFEASIBLE
            ratio = np.where(ok, np.abs(d) / np.maximum(np.abs(alpha_r), 1e-300), np.inf)
            best = float(ratio.min())
            ties = np.flatnonzero(ratio <= best + 1e-12 * max(1.0, best))
            q = int(ties[np.argmax(np.abs(alpha_r[ties]))])
            alpha = self.factor.ftran(lp.column(q))
            if abs(alpha[r]) < piv:
                self.refactor()
                alpha = self.factor.ftran(lp.column(q))
                if abs(alpha[r]) < piv:
                    raise NumericalBreakdown("dual pivot below tolerance")
            dx = (xb[r] - target) / alpha[r]
            leaving = self.basic[r]
            self.x[self.basic] = xb - alpha * dx
            self.x[q] += dx
            self.x[leaving] = target
            self._pivot(q, r, alpha)
            self.iterations += 1

    # ------------------------------------------------------------------
    def _result(self, status: str, warm: bool) -> LPResult:
        lp = self.lp
        if status != OPTIMAL:
            return LPResult(status, iterations=self.iterations, warm=warm)
        self.refactor()
        if self.infeasibility() > lp.primal_tol * 10:
            # drift after many updates; a fresh factor repaired x_B, so polish once more
            status = self.primal(self.cost)
            if self.infeasibility() > lp.primal_tol * 10:
                status = self.dual()
            if status != OPTIMAL:
                return LPResult(status, iterations=self.iterations, warm=warm)
        x = self.x[:lp.n].copy()
        y, _ = self.duals(self.cost)
        basic = self.basic.copy()
        for r, j in enumerate(basic):
            if j >= lp.n + lp.m:  # artificial left in the basis at zero: swap for its logical
                basic[r] = j - lp.m
        nb_upper = (self.row_of[:lp.n + lp.m] < 0) & np.isfinite(self.hi[:lp.n + lp.m]) & \
            (self.x[:lp.n + lp.m] >= self.hi[:lp.n + lp.m] - lp.primal_tol) & (self.lo[:lp.n + lp.m] < self.hi[:lp.n + lp.m])
        return LPResult(OPTIMAL, x, float(lp.c @ x), Basis(basic, nb_upper), self.iterations, warm, y)


def solve_arrays(A, row_lo, row_hi, c, lb, ub, **kw) -> LPResult:
    return SimplexLP(A, row_lo, row_hi, c, lb, ub, **kw).solve()
