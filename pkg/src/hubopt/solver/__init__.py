from hubopt.solver.audit import AuditReport, audit
from hubopt.solver.core import Solution, SolverConfig, Status
from hubopt.solver.solve import solve, solve_lp, solve_milp

__all__ = ["AuditReport", "Solution", "SolverConfig", "Status", "audit", "solve", "solve_lp", "solve_milp"]
