"""Compile an entity graph and an effective parameter view into a MILPInstance.

Variable naming: ``kind.entity[.entity].hNNNN`` for hourly variables and
``kind.entity.tNN`` for investment periods. Flow entities follow the flow
direction: ``unit_flow.H2_syn.H2`` leaves the unit, ``unit_flow.H2.H2_syn``
enters it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Callable

from hubopt.compiler.instance import (
    BINARY, CONTINUOUS, INTEGER, MILPInstance, VariableRef,
)
from hubopt.errors import CompileError, HuboptError, MissingCapacity, UnknownMember, UnpinnedState, Unresolved
from hubopt.model.graph import EntityGraph, Relationship
from hubopt.model.temporal import YEAR_HOURS, Blocks
from hubopt.model.validate import variable_type
from hubopt.model.values import Constant, Sense, TimeSeries, as_float, parse_duration
from hubopt.scenarios import EffectiveView

MILP = "milp"
LP = "lp"

FROM = "unit__from_node"
TO = "unit__to_node"
NN = "unit__node__node"


def flow_ref(unit: str, node: str, direction: str, h: int) -> VariableRef:
    """``direction`` is ``"to"`` for unit -> node flows and ``"from"`` for node -> unit."""
    ent = (unit, node) if direction == "to" else (node, unit)
    return VariableRef("unit_flow", ent, h)


def _ref(kind: str, name: str, i: int) -> VariableRef:
    return VariableRef(kind, (name,), i)


@dataclass
class CompileContext:
    graph: EntityGraph
    view: EffectiveView
    blocks: Blocks
    mode: str = MILP
    candidate_scale: float = 1.0
    allow_mothball: bool = False
    instance: MILPInstance = field(default_factory=MILPInstance)
    errors: list[HuboptError] = field(default_factory=list)

    # filled by build_variables
    active_units: list[str] = field(default_factory=list)
    invest_units: dict[str, float] = field(default_factory=dict)  # unit -> scaled candidates
    operated_units: set[str] = field(default_factory=set)
    uc_units: set[str] = field(default_factory=set)
    flows: dict[tuple[str, str, str], bool] = field(default_factory=dict)  # (unit, node, "to"/"from")
    storage_nodes: list[str] = field(default_factory=list)
    storage_invest: dict[str, float] = field(default_factory=dict)
    _stamps: list[datetime] = field(default_factory=list)

    def __post_init__(self):
        op = self.blocks.operation
        self._stamps = [op.model_start + h * op.resolution for h in range(self.blocks.hours)]

    @property
    def hours(self) -> range:
        return range(self.blocks.hours)

    @property
    def periods(self) -> range:
        return range(self.blocks.n_periods)

    @property
    def step(self) -> float:
        return self.blocks.operation.step_hours

    def stamp(self, h: int) -> datetime:
        return self._stamps[h]

    def series(self, key, param: str, default: float | None = None) -> list[float] | None:
        """Parameter sampled on every operational step (None when absent and no default)."""
        v = self.view.get(key, param, None)
        if v is None:
            return None if default is None else [default] * self.blocks.hours
        if isinstance(v, TimeSeries):
            return [v.at(t) for t in self._stamps]
        x = as_float(v)
        return [x] * self.blocks.hours

    def number(self, key, param: str, default: float) -> float:
        return self.view.number(key, param, default)

    def prorate(self, p: int) -> float:
        return self.blocks.period_hours(p) / YEAR_HOURS

    def member_flows(self, unit: str, endpoint: str, direction: str, h: int) -> list[VariableRef]:
        return [flow_ref(unit, n, direction, h) for n in self.graph.expand(endpoint)
                if (unit, n, direction) in self.flows]


def _scaled_candidates(value: float, domain: str, scale: float) -> float:
    if scale == 1.0:
        return value
    x = value * scale
    if domain == CONTINUOUS:
        return x
    return float(max(1, round(x))) if value >= 1 else 0.0


def _domain(text: str | None, default: str = CONTINUOUS) -> str:
    kind = variable_type(text)
    return {"integer": INTEGER, "binary": BINARY, "continuous": CONTINUOUS}.get(kind or "", default)


def _unit_relationships(graph: EntityGraph, unit: str, kind: str) -> list[Relationship]:
    return [r for r in graph.relationships(kind) if r.unit == unit]


def build_variables(ctx: CompileContext) -> None:
    g, v, inst = ctx.graph, ctx.view, ctx.instance
    milp = ctx.mode == MILP
    for name in g.units:
        key = ("unit", name)
        if not v.flag(key, "is_active", True):
            continue
        ctx.active_units.append(name)
        rels = _unit_relationships(g, name, FROM) + _unit_relationships(g, name, TO)
        has_cap = any(v.has(r.key, "unit_capacity") for r in rels)
        invest = v.has(key, "candidate_units")
        if invest and not has_cap:
            ctx.errors.append(MissingCapacity(f"unit {name} has candidate_units but no unit_capacity"))
        if v.has(key, "fix_units_on") and not has_cap:
            ctx.errors.append(MissingCapacity(f"unit {name} has fix_units_on but no unit_capacity"))

        if invest:
            domain = _domain(v.text(key, "unit_investment_variable_type"))
            cand = _scaled_candidates(ctx.number(key, "candidate_units", 0.0), domain, ctx.candidate_scale)
            ctx.invest_units[name] = cand
            if not milp:
                domain = CONTINUOUS
            for t in ctx.periods:
                inst.add_variable(_ref("units_invested", name, t), domain)
                inst.add_variable(_ref("units_invested_available", name, t), domain)
                inst.add_variable(_ref("units_mothballed", name, t), domain,
                                  ub=math.inf if ctx.allow_mothball else 0.0)

        if has_cap or invest or v.has(key, "fix_units_on"):
            ctx.operated_units.add(name)
            online = _domain(v.text(key, "online_variable_type"))
            integral = milp and online != CONTINUOUS
            if integral:
                ctx.uc_units.add(name)
            for h in ctx.hours:
                inst.add_variable(_ref("units_available", name, h))
            for h in ctx.hours:
                inst.add_variable(_ref("units_on", name, h), online if integral else CONTINUOUS)
            if integral:
                for kind in ("units_started", "units_shut_down"):
                    for h in ctx.hours[1:]:
                        inst.add_variable(_ref(kind, name, h))

        for r in rels:
            if g.is_group(r.node1):
                continue
            direction = "to" if r.kind == TO else "from"
            ctx.flows[(name, r.node1, direction)] = True
            for h in ctx.hours:
                inst.add_variable(flow_ref(name, r.node1, direction, h))

    for name in g.nodes:
        key = ("node", name)
        if not v.flag(key, "has_state", False):
            continue
        ctx.storage_nodes.append(name)
        for h in ctx.hours:
            inst.add_variable(_ref("node_state", name, h))
        if v.has(key, "candidate_storages"):
            domain = _domain(v.text(key, "storage_investment_variable_type"))
            cand = _scaled_candidates(ctx.number(key, "candidate_storages", 0.0), domain, ctx.candidate_scale)
            ctx.storage_invest[name] = cand
            for t in ctx.periods:
                inst.add_variable(_ref("storages_invested_available", name, t), domain if milp else CONTINUOUS)


def emit_investment_constraints(ctx: CompileContext) -> None:
    inst = ctx.instance
    for name, cand in ctx.invest_units.items():
        for t in ctx.periods:
            avail = _ref("units_invested_available", name, t)
            inst.add_constraint([(avail, 1.0)], Sense.LE, cand, f"Eq1:{name}:t={t}")
            terms = [(avail, 1.0), (_ref("units_invested", name, t), -1.0),
                     (_ref("units_mothballed", name, t), 1.0)]
            if t > 0:
                terms.append((_ref("units_invested_available", name, t - 1), -1.0))
            inst.add_constraint(terms, Sense.EQ, 0.0, f"Eq2:{name}:t={t}")
    for name, cand in ctx.storage_invest.items():
        for t in ctx.periods:
            inst.add_constraint([(_ref("storages_invested_available", name, t), 1.0)], Sense.LE, cand,
                                f"Eq1s:{name}:t={t}")


def emit_availability_constraints(ctx: CompileContext) -> None:
    inst = ctx.instance
    for name in ctx.active_units:
        if name not in ctx.operated_units:
            continue
        key = ("unit", name)
        number = ctx.number(key, "number_of_units", 1.0)
        factor = ctx.series(key, "unit_availability_factor", 1.0)
        fixed = ctx.series(key, "fix_units_on")
        for h in ctx.hours:
            terms = [(_ref("units_available", name, h), 1.0)]
            if name in ctx.invest_units:
                terms.append((_ref("units_invested_available", name, ctx.blocks.period_of(h)), -factor[h]))
            inst.add_constraint(terms, Sense.LE, factor[h] * number, f"Eq3:{name}:h={h}")
        for h in ctx.hours:
            on = _ref("units_on", name, h)
            inst.add_constraint([(on, 1.0), (_ref("units_available", name, h), -1.0)], Sense.LE, 0.0,
                                f"Eq4:{name}:h={h}")
            if fixed is not None:
                inst.add_constraint([(on, 1.0)], Sense.EQ, fixed[h], f"fix_on:{name}:h={h}")


def emit_flow_constraints(ctx: CompileContext) -> None:
    g, inst = ctx.graph, ctx.instance
    for r in g.relationships(FROM) + g.relationships(TO):
        if r.unit not in ctx.operated_units or not ctx.view.has(r.key, "unit_capacity"):
            continue
        direction = "to" if r.kind == TO else "from"
        cap = ctx.series(r.key, "unit_capacity")
        mop = ctx.series(r.key, "minimum_operating_point")
        for h in ctx.hours:
            flows = [(f, 1.0) for f in ctx.member_flows(r.unit, r.node1, direction, h)]
            on = _ref("units_on", r.unit, h)
            inst.add_constraint(flows + [(on, -cap[h])], Sense.LE, 0.0, f"Eq5:{r.name}:h={h}")
            if mop is not None and mop[h] > 0:
                inst.add_constraint(flows + [(on, -mop[h] * cap[h])], Sense.GE, 0.0, f"min_op:{r.name}:h={h}")


def emit_ratio_constraints(ctx: CompileContext) -> None:
    inst = ctx.instance
    for r in ctx.graph.relationships(NN):
        if r.unit not in ctx.active_units:
            continue
        for param, lhs_dir, rhs_dir, rhs_node, lhs_node in (
            ("fix_ratio_in_out_unit_flow", "from", "to", r.node2, r.node1),
            ("fix_ratio_out_out_unit_flow", "to", "to", r.node1, r.node2),
        ):
            ratio = ctx.series(r.key, param)
            if ratio is None:
                continue
            tag = "ratio_in_out" if param.startswith("fix_ratio_in_out") else "ratio_out_out"
            for h in ctx.hours:
                terms = [(f, 1.0) for f in ctx.member_flows(r.unit, lhs_node, lhs_dir, h)]
                terms += [(f, -ratio[h]) for f in ctx.member_flows(r.unit, rhs_node, rhs_dir, h)]
                inst.add_constraint(terms, Sense.EQ, 0.0, f"{tag}:{r.name}:h={h}")


def _node_flows(ctx: CompileContext) -> tuple[dict[str, list[str]], dict[str, list[str]]]:
    inflow: dict[str, list[str]] = {}
    outflow: dict[str, list[str]] = {}
    for (unit, node, direction) in sorted(ctx.flows):
        (inflow if direction == "to" else outflow).setdefault(node, []).append(unit)
    return inflow, outflow


def emit_nodal_balance(ctx: CompileContext) -> None:
    inst = ctx.instance
    inflow, outflow = _node_flows(ctx)
    storage = set(ctx.storage_nodes)
    for name in ctx.graph.nodes:
        if name in storage or (name not in inflow and name not in outflow):
            continue
        sense = Sense.parse(ctx.view.text(("node", name), "nodal_balance_sense", Sense.EQ))
        for h in ctx.hours:
            terms = [(flow_ref(u, name, "to", h), 1.0) for u in inflow.get(name, ())]
            terms += [(flow_ref(u, name, "from", h), -1.0) for u in outflow.get(name, ())]
            inst.add_constraint(terms, sense, 0.0, f"balance:{name}:h={h}")


def initial_state(ctx: CompileContext, name: str) -> float | None:
    """Pinned level just before the first operational step, if any."""
    v = ctx.view.get(("node", name), "fix_node_state", None)
    if v is None:
        return None
    if isinstance(v, TimeSeries):
        before = ctx.blocks.operation.model_start - ctx.blocks.operation.resolution
        try:
            return v.at(before)
        except Unresolved:
            return None
    return as_float(v)


def emit_storage_constraints(ctx: CompileContext) -> None:
    inst, view = ctx.instance, ctx.view
    inflow, outflow = _node_flows(ctx)
    for name in ctx.storage_nodes:
        key = ("node", name)
        s0 = initial_state(ctx, name)
        cyclic = view.flag(key, "cyclic_condition", False)
        if s0 is None and not cyclic:
            ctx.errors.append(UnpinnedState(f"storage node {name} has neither fix_node_state nor cyclic_condition"))
            continue
        keep = [1.0 - x for x in ctx.series(key, "frac_state_loss", 0.0)]
        last = ctx.blocks.hours - 1
        for h in ctx.hours:
            state = _ref("node_state", name, h)
            terms = [(state, 1.0)]
            terms += [(flow_ref(u, name, "to", h), -1.0) for u in inflow.get(name, ())]
            terms += [(flow_ref(u, name, "from", h), 1.0) for u in outflow.get(name, ())]
            rhs = 0.0
            if h > 0:
                terms.append((_ref("node_state", name, h - 1), -keep[h]))
            elif s0 is not None:
                rhs = keep[h] * s0
            elif last > 0:
                terms.append((_ref("node_state", name, last), -keep[h]))
            else:
                terms[0] = (state, 1.0 - keep[h])
            inst.add_constraint(terms, Sense.EQ, rhs, f"state:{name}:h={h}")
        cap = ctx.series(key, "node_state_cap")
        if cap is not None:
            existing = ctx.number(key, "number_of_storages", 0.0 if name in ctx.storage_invest else 1.0)
            for h in ctx.hours:
                terms = [(_ref("node_state", name, h), 1.0)]
                if name in ctx.storage_invest:
                    terms.append((_ref("storages_invested_available", name, ctx.blocks.period_of(h)), -cap[h]))
                inst.add_constraint(terms, Sense.LE, cap[h] * existing, f"state_cap:{name}:h={h}")
        if cyclic and s0 is not None and ctx.blocks.hours:
            inst.add_constraint([(_ref("node_state", name, last), 1.0)], Sense.EQ, s0, f"cyclic:{name}")


def emit_uc_constraints(ctx: CompileContext) -> None:
    inst = ctx.instance
    for name in ctx.active_units:
        if name not in ctx.uc_units:
            continue
        for h in ctx.hours[1:]:
            inst.add_constraint(
                [(_ref("units_on", name, h), 1.0), (_ref("units_on", name, h - 1), -1.0),
                 (_ref("units_started", name, h), -1.0), (_ref("units_shut_down", name, h), 1.0)],
                Sense.EQ, 0.0, f"uc_link:{name}:h={h}")
        mdt = ctx.view.get(("unit", name), "min_down_time", None)
        if mdt is None:
            continue
        d = parse_duration(getattr(mdt, "value", mdt)) if not isinstance(mdt, Constant) else timedelta(hours=mdt.value)
        steps = math.ceil(d / ctx.blocks.operation.resolution)
        if steps <= 0:
            continue
        for h in ctx.hours[1:]:
            terms = [(_ref("units_on", name, h), 1.0), (_ref("units_available", name, h), -1.0)]
            terms += [(_ref("units_shut_down", name, k), 1.0) for k in range(max(1, h - steps + 1), h + 1)]
            inst.add_constraint(terms, Sense.LE, 0.0, f"min_down:{name}:h={h}")


MEMBER_COEFFICIENTS = {
    "units_on_coefficient": "units_on",
    "units_invested_available_coefficient": "units_invested_available",
}


def emit_user_constraints(ctx: CompileContext) -> None:
    inst, view = ctx.instance, ctx.view
    members: dict[str, list] = {}
    for m in ctx.graph.memberships("unit__user_constraint"):
        unit, uc = m.name.split("|", 1)
        members.setdefault(uc, []).append((unit, m))
    horizon_share = ctx.blocks.horizon_hours / YEAR_HOURS
    for name in ctx.graph.user_constraints:
        key = ("user_constraint", name)
        if not (view.has(key, "constraint_sense") and view.has(key, "right_hand_side")):
            continue
        sense = Sense.parse(view.text(key, "constraint_sense"))
        rhs = view.number(key, "right_hand_side") * horizon_share
        terms = []
        for unit, m in members.get(name, ()):
            if unit not in ctx.active_units:
                continue
            for param, kind in MEMBER_COEFFICIENTS.items():
                if not view.has(m.key, param):
                    continue
                coef = view.number(m.key, param)
                if kind == "units_on":
                    if unit not in ctx.operated_units:
                        ctx.errors.append(UnknownMember(f"user constraint {name}: unit {unit} has no units_on"))
                        continue
                    terms += [(_ref(kind, unit, h), coef * ctx.step) for h in ctx.hours]
                else:
                    if unit not in ctx.invest_units:
                        ctx.errors.append(UnknownMember(f"user constraint {name}: unit {unit} has no investment"))
                        continue
                    terms += [(_ref(kind, unit, t), coef) for t in ctx.periods]
        if terms:
            inst.add_constraint(terms, sense, rhs, f"user:{name}")


def build_objective(ctx: CompileContext) -> None:
    g, inst = ctx.graph, ctx.instance
    for r in g.relationships(FROM) + g.relationships(TO):
        if r.unit not in ctx.active_units:
            continue
        cost = ctx.series(r.key, "fuel_cost")
        if cost is None:
            continue
        direction = "to" if r.kind == TO else "from"
        for h in ctx.hours:
            for f in ctx.member_flows(r.unit, r.node1, direction, h):
                inst.add_cost(f, cost[h] * ctx.step)
    for name in ctx.active_units:
        key = ("unit", name)
        fom = ctx.number(key, "fom_cost", 0.0)
        inv = ctx.number(key, "unit_investment_cost", 0.0)
        number = ctx.number(key, "number_of_units", 1.0)
        for t in ctx.periods:
            share = ctx.prorate(t)
            inst.objective_constant += fom * number * share
            if name in ctx.invest_units:
                inst.add_cost(_ref("units_invested", name, t), inv * share)
                inst.add_cost(_ref("units_invested_available", name, t), fom * share)
    for name in ctx.storage_invest:
        cost = ctx.number(("node", name), "storage_investment_cost", 0.0)
        for t in ctx.periods:
            inst.add_cost(_ref("storages_invested_available", name, t), cost * ctx.prorate(t))


EMITTERS: tuple[Callable[[CompileContext], None], ...] = (
    emit_investment_constraints,
    emit_availability_constraints,
    emit_flow_constraints,
    emit_ratio_constraints,
    emit_nodal_balance,
    emit_storage_constraints,
    emit_uc_constraints,
    emit_user_constraints,
    build_objective,
)


def compile_instance(graph: EntityGraph, view: EffectiveView, blocks: Blocks, mode: str = MILP,
                     candidate_scale: float = 1.0, allow_mothball: bool = False,
                     scenario: str | None = None) -> MILPInstance:
    """Run every emitter in a fixed order; emitter errors are collected into one CompileError."""
    if mode not in (MILP, LP):
        raise ValueError(f"mode must be {MILP!r} or {LP!r}, got {mode!r}")
    ctx = CompileContext(graph, view, blocks, mode, candidate_scale, allow_mothball)
    try:
        build_variables(ctx)
        for emit in EMITTERS:
            emit(ctx)
    except Unresolved as exc:
        ctx.errors.append(exc)
    if ctx.errors:
        raise CompileError(ctx.errors)
    inst = ctx.instance
    inst.metadata.update(
        scenario=scenario or "+".join(view.layers),
        layers=list(view.layers),
        mode=mode,
        hours=blocks.hours,
        horizon_hours=blocks.horizon_hours,
        model_start=blocks.operation.model_start.isoformat(),
        step_hours=ctx.step,
        candidate_scale=candidate_scale,
        sales=_sales(ctx),
        units=_unit_ratings(ctx),
        active_units=list(ctx.active_units),
    )
    return inst


def _unit_ratings(ctx: CompileContext) -> dict[str, dict]:
    """Per operated unit: the flow its capacity rates (output preferred) and the capacity per unit."""
    out = {}
    for name in ctx.active_units:
        if name not in ctx.operated_units:
            continue
        rated = None
        for kind, direction in ((TO, "to"), (FROM, "from")):
            for r in _unit_relationships(ctx.graph, name, kind):
                if rated is None and not ctx.graph.is_group(r.node1) and ctx.view.has(r.key, "unit_capacity"):
                    rated = (r.node1, direction, max(ctx.series(r.key, "unit_capacity")))
        if rated is None:
            continue
        out[name] = {
            "node": rated[0],
            "direction": rated[1],
            "capacity": rated[2],
            "number_of_units": ctx.number(("unit", name), "number_of_units", 1.0),
            "investable": name in ctx.invest_units,
        }
    return out


def _sales(ctx: CompileContext) -> list[list[str]]:
    """(unit, node) pairs delivering into a GE node at a negative fuel cost somewhere in the horizon."""
    out = []
    for r in ctx.graph.relationships(TO):
        if r.unit not in ctx.active_units or not ctx.view.has(r.key, "fuel_cost"):
            continue
        cost = ctx.series(r.key, "fuel_cost")
        for node in ctx.graph.expand(r.node1):
            if (r.unit, node, "to") not in ctx.flows:
                continue
            sense = Sense.parse(ctx.view.text(("node", node), "nodal_balance_sense", Sense.EQ))
            if sense == Sense.GE and min(cost, default=0.0) < 0:
                out.append([r.unit, node])
    return out
