"""Independent feasibility check of a solution against the compiled constraints."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from hubopt.compiler.instance import MILPInstance, VariableRef
from hubopt.errors import AuditFailure


@dataclass
class AuditReport:
    max_residual: float = 0.0
    worst: str = ""
    bound_violation: float = 0.0
    integrality_violation: float = 0.0
    violations: list[tuple[str, float]] = field(default_factory=list)

    @property
    def worst_violation(self) -> float:
        return max(self.max_residual, self.bound_violation, self.integrality_violation)

    def ok(self, tol: float = 1e-6) -> bool:
        return self.worst_violation <= tol


def audit(instance: MILPInstance, values: Mapping[VariableRef, float], tol: float = 1e-6) -> AuditReport:
    """Re-evaluate every constraint term by term; missing values count as zero."""
    rep = AuditReport()
    for con in instance.constraints:
        r = con.violation(values)
        if r > rep.max_residual:
            rep.max_residual, rep.worst = r, con.tag
        if r > tol:
            rep.violations.append((con.tag, r))
    for var in instance.variables:
        x = values.get(var.ref, 0.0)
        below = var.lb - x if math.isfinite(var.lb) else 0.0
        above = x - var.ub if math.isfinite(var.ub) else 0.0
        b = max(0.0, below, above)
        if b > rep.bound_violation:
            rep.bound_violation = b
        if b > tol:
            rep.violations.append((f"bounds:{var.ref.name}", b))
        if var.is_integer:
            rep.integrality_violation = max(rep.integrality_violation, abs(x - round(x)))
    return rep


def check(instance: MILPInstance, values: Mapping[VariableRef, float], tol: float = 1e-6,
          integrality_tol: float = 1e-6) -> AuditReport:
    rep = audit(instance, values, tol)
    if rep.max_residual > tol or rep.bound_violation > tol or rep.integrality_violation > integrality_tol:
        head = ", ".join(f"{t} ({v:.3g})" for t, v in rep.violations[:5])
        raise AuditFailure(f"solution violates constraints: max residual {rep.max_residual:.3g} at "
                           f"{rep.worst or '-'}, bounds {rep.bound_violation:.3g}, integrality "
                           f"{rep.integrality_violation:.3g}; {head}")
    return rep
