from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass

from hubopt.model.graph import EntityGraph
from hubopt.model.values import Constant, Enum, Flag, ParameterValue, Sense, TimeSeries, parse_duration, parse_time

STATE_PARAMS = ("node_state_cap", "frac_state_loss", "fix_node_state", "cyclic_condition",
                "candidate_storages", "storage_investment_cost", "storage_investment_variable_type")
VARIABLE_TYPES = ("continuous", "integer", "binary")


@dataclass(frozen=True, order=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    entity: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.entity}: {self.message}"


def _numbers(v: ParameterValue) -> list[float]:
    if isinstance(v, Constant):
        return [v.value]
    if isinstance(v, TimeSeries):
        return list(v.values)
    return []


def variable_type(text: str | None) -> str | None:
    """Map ``unit_investment_variable_type_integer`` and friends to a domain name."""
    if text is None:
        return None
    low = text.lower()
    for kind in VARIABLE_TYPES:
        if low.endswith(kind):
            return kind
    return None


def _all_values(e, param: str) -> list[ParameterValue]:
    return [e.parameters[param][k] for k in sorted(e.parameters.get(param, {}))]


def validate_graph(graph: EntityGraph) -> list[Diagnostic]:
    """Structural and range checks over every layer's values; returns sorted diagnostics."""
    out: list[Diagnostic] = []

    def err(entity: str, msg: str, severity: str = "error"):
        out.append(Diagnostic(severity, entity, msg))

    # -- units --
    for name, u in graph.units.items():
        if "unit_investment_variable_type" in u.parameters:
            if "candidate_units" not in u.parameters:
                err(name, "investment variable type given without candidate_units")
            for v in _all_values(u, "unit_investment_variable_type"):
                if variable_type(getattr(v, "value", None) if isinstance(v, Enum) else None) is None:
                    err(name, f"unknown investment variable type {v!r}")
        for param in ("candidate_units", "number_of_units"):
            for v in _all_values(u, param):
                if any(x < 0 for x in _numbers(v)):
                    err(name, f"{param} must be >= 0")
        for v in _all_values(u, "online_variable_type"):
            if not isinstance(v, Enum) or variable_type(v.value) is None:
                err(name, f"unknown online variable type {v!r}")
        for v in _all_values(u, "min_down_time"):
            try:
                parse_duration(getattr(v, "value", v))
            except ValueError:
                err(name, f"min_down_time {v!r} is not a duration")

    # -- nodes --
    for name, n in graph.nodes.items():
        for v in _all_values(n, "nodal_balance_sense"):
            try:
                Sense.parse(getattr(v, "value", ""))
            except ValueError:
                err(name, f"unknown nodal balance sense {v!r}")
        for v in _all_values(n, "frac_state_loss"):
            if any(not (0.0 <= x < 1.0) for x in _numbers(v)):
                err(name, "loss fraction out of range [0, 1)")
        for v in _all_values(n, "node_state_cap"):
            if any(x < 0 for x in _numbers(v)):
                err(name, "node_state_cap must be >= 0")
        for v in _all_values(n, "candidate_storages"):
            if any(x < 0 for x in _numbers(v)):
                err(name, "candidate_storages must be >= 0")
        has_state = any(isinstance(v, Flag) and v.value for v in _all_values(n, "has_state"))
        state_params = [p for p in STATE_PARAMS if p in n.parameters]
        if state_params and not has_state:
            err(name, f"state parameters {state_params} on a node without has_state")

    # -- groups --
    for name, g in graph.groups.items():
        if not g.members:
            err(name, "group has no members")
        if g.parameters:
            err(name, f"group parameters are not supported: {sorted(g.parameters)}")
        if ("node", name) in graph.entities:
            err(name, "name used by both a node and a group")

    # -- relationships --
    charging: dict[str, int] = defaultdict(int)
    discharging: dict[str, int] = defaultdict(int)
    preds: dict[tuple[str, str], set[tuple[str, str]]] = defaultdict(set)
    has_input: set[str] = set()
    for r in graph.relationships():
        label = f"{r.kind}:{r.name}"
        for param in ("fix_ratio_in_out_unit_flow", "fix_ratio_out_out_unit_flow", "fix_ratio_in_in_unit_flow"):
            for v in _all_values(r, param):
                if any(x <= 0 for x in _numbers(v)):
                    err(label, f"{param} must be > 0")
        for v in _all_values(r, "minimum_operating_point"):
            if any(not (0.0 <= x <= 1.0) for x in _numbers(v)):
                err(label, "minimum_operating_point must lie in [0, 1]")
        for v in _all_values(r, "unit_capacity"):
            if any(x < 0 for x in _numbers(v)):
                err(label, "unit_capacity must be >= 0")
        if r.kind == "unit__node__node":
            continue
        for node in graph.expand(r.node1):
            if r.kind == "unit__to_node":
                charging[node] += 1
                preds[("node", node)].add(("unit", r.unit))
            else:
                discharging[node] += 1
                preds[("unit", r.unit)].add(("node", node))
                has_input.add(r.unit)

    for name, n in graph.nodes.items():
        if any(isinstance(v, Flag) and v.value for v in _all_values(n, "has_state")):
            if not charging[name] or not discharging[name]:
                err(name, "storage node needs at least one charging and one discharging relationship")

    sources = {("node", name) for name, n in graph.nodes.items()
               if any(isinstance(v, Enum) and _sense_or_none(v.value) == Sense.LE
                      for v in _all_values(n, "nodal_balance_sense"))}
    sources |= {("unit", u) for u in graph.units if u not in has_input}
    for r in graph.relationships("unit__to_node"):
        if any(x < 0 for v in _all_values(r, "fuel_cost") for x in _numbers(v)):
            if not _reaches_source(("unit", r.unit), preds, sources):
                err(r.unit, f"sells into {r.node1} but no relationship path leads from a source")

    # -- model / temporal --
    for name, m in graph.of_class("model").items():
        starts = [parse_time(v.value) for v in _all_values(m, "model_start") if isinstance(v, Enum)]
        ends = [parse_time(v.value) for v in _all_values(m, "model_end") if isinstance(v, Enum)]
        for s in starts:
            for e in ends:
                if not s < e:
                    err(name, f"model_start {s.isoformat()} is not before model_end {e.isoformat()}")
    for name, tb in graph.of_class("temporal_block").items():
        for v in _all_values(tb, "resolution"):
            try:
                if parse_duration(getattr(v, "value", "")).total_seconds() <= 0:
                    err(name, "resolution must be positive")
            except ValueError:
                err(name, f"resolution {v!r} is not a duration")

    for name, uc in graph.user_constraints.items():
        for v in _all_values(uc, "constraint_sense"):
            if _sense_or_none(getattr(v, "value", "")) is None:
                err(name, f"unknown constraint sense {v!r}")

    return sorted(out)


def _sense_or_none(text: str) -> str | None:
    try:
        return Sense.parse(text)
    except ValueError:
        return None


def _reaches_source(start, preds, sources) -> bool:
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if cur in sources:
            return True
        for p in preds.get(cur, ()):
            if p not in seen:
                seen.add(p)
                queue.append(p)
    return False
