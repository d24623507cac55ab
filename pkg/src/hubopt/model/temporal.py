from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

from hubopt.errors import Unresolved
from hubopt.model.values import Enum, as_float, parse_duration, parse_time

OPERATION_BLOCK = "operation"
INVESTMENT_BLOCK = "investment"
YEAR_HOURS = 8736.0  # one 364D investment period


@dataclass(frozen=True)
class TemporalBlock:
    name: str
    model_start: datetime
    model_end: datetime
    resolution: timedelta

    def __post_init__(self):
        if not self.model_start < self.model_end:
            raise ValueError(f"block {self.name}: start {self.model_start} is not before end {self.model_end}")
        if self.resolution <= timedelta(0):
            raise ValueError(f"block {self.name}: resolution must be positive")

    @property
    def n_steps(self) -> int:
        span = self.model_end - self.model_start
        n, rem = divmod(span, self.resolution)
        return n + (1 if rem else 0)

    @property
    def divisible(self) -> bool:
        return (self.model_end - self.model_start) % self.resolution == timedelta(0)

    @property
    def step_hours(self) -> float:
        return self.resolution.total_seconds() / 3600.0

    def timestamps(self) -> list[datetime]:
        return [self.model_start + k * self.resolution for k in range(self.n_steps)]

    def index_of(self, t: datetime) -> int:
        return int((t - self.model_start) // self.resolution)


@dataclass(frozen=True)
class Blocks:
    operation: TemporalBlock
    investment: TemporalBlock | None

    @property
    def hours(self) -> int:
        return self.operation.n_steps

    @property
    def horizon_hours(self) -> float:
        return self.operation.n_steps * self.operation.step_hours

    @property
    def year_hours(self) -> float:
        if self.investment is None:
            return YEAR_HOURS
        return self.investment.step_hours

    def period_of(self, h: int) -> int:
        if self.investment is None:
            return 0
        t = self.operation.model_start + h * self.operation.resolution
        return max(0, self.investment.index_of(t))

    @property
    def n_periods(self) -> int:
        return self.period_of(self.hours - 1) + 1 if self.hours else 1

    def period_hours(self, p: int) -> float:
        return sum(self.operation.step_hours for h in range(self.hours) if self.period_of(h) == p)


def _model_key(view):
    keys = sorted({k for (k, _), _ in view.items() if k[0] == "model"})
    if not keys:
        raise Unresolved("no model entity in the active scenario stack")
    return keys[0]


def make_blocks(view, horizon: timedelta | str | None = None) -> Blocks:
    """Operational and investment blocks; ``horizon`` overrides ``model_end``."""
    mkey = _model_key(view)
    start_v = view.get(mkey, "model_start")
    start = parse_time(start_v.value if isinstance(start_v, Enum) else str(start_v))
    if horizon is not None:
        end = start + (parse_duration(horizon) if isinstance(horizon, str) else horizon)
    else:
        end_v = view.get(mkey, "model_end")
        end = parse_time(end_v.value if isinstance(end_v, Enum) else str(end_v))

    op_key = ("temporal_block", OPERATION_BLOCK)
    res = view.get(op_key, "resolution", None)
    op_res = parse_duration(res.value) if isinstance(res, Enum) else timedelta(hours=as_float(res) if res else 1.0)
    operation = TemporalBlock(OPERATION_BLOCK, start, end, op_res)

    inv_key = ("temporal_block", INVESTMENT_BLOCK)
    investment = None
    if view.has(inv_key, "resolution"):
        inv_res = parse_duration(view.get(inv_key, "resolution").value)
        b_start = view.get(inv_key, "block_start", None)
        b_end = view.get(inv_key, "block_end", None)
        i_start = start + (parse_duration(b_start.value) if b_start is not None else timedelta(0))
        i_end = start + parse_duration(b_end.value) if b_end is not None else max(end, i_start + inv_res)
        investment = TemporalBlock(INVESTMENT_BLOCK, i_start, max(i_end, i_start + inv_res), inv_res)
    return Blocks(operation, investment)
