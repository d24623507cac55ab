"""KPIs (full-load hours, production, sales, profit split) and the CSV result tables."""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from hubopt.compiler.instance import MILPInstance, VariableRef
from hubopt.errors import IoFailure, MissingSolutionValue
from hubopt.model.temporal import YEAR_HOURS
from hubopt.solver.core import Solution
from hubopt.solver.mps import fmt_number


@dataclass(frozen=True)
class UnitKPI:
    unit: str
    node: str  # the rated flow's node
    invested: float  # units
    installed: float  # capacity in the rated flow's native unit per hour
    production: float
    flh: float


@dataclass(frozen=True)
class CommodityKPI:
    node: str
    produced: float
    sold: float


@dataclass
class KPIReport:
    scenario: str
    status: str
    horizon_hours: float
    annualized: bool
    units: list[UnitKPI] = field(default_factory=list)
    commodities: list[CommodityKPI] = field(default_factory=list)
    storages: dict[str, float] = field(default_factory=dict)  # invested storage units
    objective: float = 0.0
    fuel_cost: float = 0.0
    revenue: float = 0.0
    investment_cost: float = 0.0
    fom_cost: float = 0.0

    @property
    def profit(self) -> float:
        return -self.objective

    def unit(self, name: str) -> UnitKPI:
        return next(u for u in self.units if u.unit == name)

    def commodity(self, node: str) -> CommodityKPI:
        return next(c for c in self.commodities if c.node == node)


def full_load_hours(production: float, capacity: float) -> float:
    return production / capacity if capacity > 0 else 0.0


def compute_kpis(instance: MILPInstance, solution: Solution, annualize: bool = False) -> KPIReport:
    """Money and quantities are summed over the horizon, or scaled to a 8736 h year with ``annualize``."""
    if not solution.status.has_values:
        raise MissingSolutionValue(f"solution status {solution.status} carries no values")
    vals = solution.values
    missing = [v.ref.name for v in instance.variables if v.ref not in vals]
    if missing:
        raise MissingSolutionValue(f"{len(missing)} variable(s) without a value, e.g. {missing[0]}")

    meta = instance.metadata
    horizon = float(meta.get("horizon_hours", 0.0))
    step = float(meta.get("step_hours", 1.0))
    scale = YEAR_HOURS / horizon if annualize and horizon > 0 else 1.0

    rep = KPIReport(str(meta.get("scenario", "")), solution.status.value, horizon, annualize)

    fuel = revenue = inv = fom = 0.0
    for ref, c in instance.objective.items():
        term = c * vals[ref]
        if ref.kind == "unit_flow":
            if c > 0:
                fuel += term
            else:
                revenue -= term
        elif ref.kind in ("units_invested", "storages_invested_available"):
            inv += term
        else:
            fom += term
    fom += instance.objective_constant
    rep.objective = instance.evaluate(vals) * scale
    rep.fuel_cost, rep.revenue = fuel * scale, revenue * scale
    rep.investment_cost, rep.fom_cost = inv * scale, fom * scale

    flows: dict[tuple[str, str], float] = defaultdict(float)  # (from, to) -> total over horizon
    for ref, x in vals.items():
        if ref.kind == "unit_flow":
            flows[ref.entity] += x * step
    last_period = defaultdict(float)
    for ref, x in vals.items():
        if ref.kind in ("units_invested_available", "storages_invested_available"):
            last_period[(ref.kind, ref.entity[0])] = x

    for name, info in sorted(meta.get("units", {}).items()):
        node, direction = info["node"], info["direction"]
        key = (name, node) if direction == "to" else (node, name)
        invested = last_period.get(("units_invested_available", name), 0.0)
        installed = info["capacity"] * (info["number_of_units"] + invested)
        production = flows.get(key, 0.0)
        flh = full_load_hours(production, installed)
        rep.units.append(UnitKPI(name, node, invested, installed, production * scale, flh * scale))

    sold_pairs = {tuple(p) for p in meta.get("sales", [])}
    produced: dict[str, float] = defaultdict(float)
    sold: dict[str, float] = defaultdict(float)
    units = set(meta.get("active_units", ()))
    for (a, b), q in flows.items():
        if a in units:  # flow entities run along the flow, so unit outputs start at a unit
            produced[b] += q
        if (a, b) in sold_pairs:
            sold[b] += q
    for node in sorted(set(produced) | set(sold)):
        rep.commodities.append(CommodityKPI(node, produced[node] * scale, sold[node] * scale))
    rep.storages = {e: x for (k, e), x in sorted(last_period.items()) if k == "storages_invested_available"}
    return rep


def _write(path: Path, header: list[str], rows: list[list]) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt_number(x) if isinstance(x, float) else x for x in row])
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from None


def emit_results(report: KPIReport, solution: Solution, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create {out}: {exc}") from None
    vals = solution.values

    inv_rows = []
    for ref in sorted(vals, key=_ref_order):
        if ref.kind in ("units_invested_available", "storages_invested_available"):
            kind = "unit" if ref.kind.startswith("units") else "storage"
            inv_rows.append([kind, ref.entity[0], ref.index, float(vals[ref])])
    paths = [out / "investments.csv"]
    _write(paths[-1], ["kind", "entity", "period", "invested"], inv_rows)

    kpi_rows: list[list] = [
        ["status", "", report.status],
        ["horizon_hours", "", float(report.horizon_hours)],
        ["annualized", "", "true" if report.annualized else "false"],
        ["objective", "", float(report.objective)],
        ["profit", "", float(report.profit)],
        ["fuel_cost", "", float(report.fuel_cost)],
        ["revenue", "", float(report.revenue)],
        ["investment_cost", "", float(report.investment_cost)],
        ["fom_cost", "", float(report.fom_cost)],
    ]
    for u in report.units:
        kpi_rows += [["invested_units", u.unit, float(u.invested)], ["installed_capacity", u.unit, float(u.installed)],
                     ["production", u.unit, float(u.production)], ["flh", u.unit, float(u.flh)]]
    for c in report.commodities:
        kpi_rows += [["produced", c.node, float(c.produced)], ["sold", c.node, float(c.sold)]]
    paths.append(out / "kpis.csv")
    _write(paths[-1], ["metric", "entity", "value"], kpi_rows)

    paths.append(out / "flows_hourly.csv")
    _write(paths[-1], *_hourly(vals, "unit_flow", lambda e: "->".join(e)))
    paths.append(out / "storage_state.csv")
    _write(paths[-1], *_hourly(vals, "node_state", lambda e: e[0]))
    return paths


def _ref_order(ref: VariableRef):
    return (ref.kind, ref.entity, ref.index)


def _hourly(vals: dict[VariableRef, float], kind: str, label) -> tuple[list[str], list[list]]:
    series: dict[tuple[str, ...], dict[int, float]] = defaultdict(dict)
    for ref, x in vals.items():
        if ref.kind == kind:
            series[ref.entity][ref.index] = x
    keys = sorted(series)
    hours = sorted({h for s in series.values() for h in s})
    rows = [[h] + [float(series[k].get(h, math.nan)) for k in keys] for h in hours]
    return ["hour"] + [label(k) for k in keys], rows
