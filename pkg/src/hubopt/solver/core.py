from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from hubopt.compiler.instance import VariableRef
from hubopt.errors import MissingSolutionValue


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    GAP_LIMIT = "GapLimit"
    ITERATION_LIMIT = "IterationLimit"

    def __str__(self) -> str:
        return self.value

    @property
    def has_values(self) -> bool:
        return self in (Status.OPTIMAL, Status.GAP_LIMIT)


LP_ENGINES = ("auto", "simplex", "highs")


@dataclass(frozen=True)
class SolverConfig:
    feasibility_tol: float = 1e-6
    integrality_tol: float = 1e-6
    relative_gap: float = 1e-4
    absolute_gap: float = 1e-6
    pivot_tol: float = 1e-9
    node_limit: int | None = None
    time_limit: float | None = None
    lp_engine: str = "auto"
    simplex_max_rows: int = 2000  # "auto" hands larger LPs to HiGHS
    dive: bool = True
    audit: bool = True

    def __post_init__(self):
        for name in ("feasibility_tol", "integrality_tol", "relative_gap", "absolute_gap", "pivot_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.lp_engine not in LP_ENGINES:
            raise ValueError(f"lp_engine must be one of {LP_ENGINES}")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be > 0")
        if self.node_limit is not None and self.node_limit < 1:
            raise ValueError("node_limit must be >= 1")


@dataclass
class Solution:
    status: Status
    values: dict[VariableRef, float] = field(default_factory=dict)
    objective: float = math.nan
    best_bound: float = math.nan
    gap: float = math.nan
    nodes: int = 0
    iterations: int = 0
    runtime: float = 0.0
    engine: str = ""

    def value(self, ref: VariableRef) -> float:
        try:
            return self.values[ref]
        except KeyError:
            raise MissingSolutionValue(f"no value for {ref.name}") from None

    def __getitem__(self, ref: VariableRef) -> float:
        return self.value(ref)

    def get(self, ref: VariableRef, default: float = 0.0) -> float:
        return self.values.get(ref, default)

    @property
    def profit(self) -> float:
        return -self.objective


def relative_gap(incumbent: float, bound: float, absolute: float = 1e-6) -> float:
    """0 when the absolute gap is within ``absolute``; otherwise gap over |incumbent|."""
    if not math.isfinite(incumbent):
        return math.inf
    diff = max(0.0, incumbent - bound)
    if diff <= absolute:
        return 0.0
    return diff / max(abs(incumbent), 1e-10)
