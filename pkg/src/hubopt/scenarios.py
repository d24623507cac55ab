"""Scenario layers, stacking, and the built-in scenario definitions.

A stack lists layer names lowest priority first; for every (entity, parameter)
the last layer that defines it wins.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable, Iterable, Mapping, Sequence

from hubopt.errors import UndeclaredLayer, Unresolved
from hubopt.model.graph import EntityGraph, EntityKey
from hubopt.model.validate import Diagnostic
from hubopt.model.values import Constant, Enum, Flag, ParameterValue, as_float

Slot = tuple[EntityKey, str]

OPT_CAPEX = "Opt-CAPEX"
P2X_PREFIXES = ("MeOH_syn", "NH3_syn")
DEFAULT_CAPEX_FACTOR = 0.5


@dataclass(frozen=True)
class ScenarioLayer:
    name: str
    overrides: Mapping[Slot, ParameterValue] = field(default_factory=dict)


@dataclass(frozen=True)
class ScenarioStack:
    name: str
    layers: tuple[str, ...]

    def __post_init__(self):
        dup = sorted({x for x in self.layers if self.layers.count(x) > 1})
        if dup:
            raise ValueError(f"stack {self.name}: duplicate layer(s) {dup}")

    def extended(self, extra: Iterable[str], name: str | None = None) -> "ScenarioStack":
        return ScenarioStack(name or self.name, self.layers + tuple(extra))


_MISSING = object()


class EffectiveView:
    """Flattened parameter set handed to the compiler."""

    def __init__(self, values: Mapping[Slot, ParameterValue] | None = None, layers: Sequence[str] = ()):
        self._values: dict[Slot, ParameterValue] = dict(values or {})
        self.layers = tuple(layers)

    def __eq__(self, other) -> bool:
        return isinstance(other, EffectiveView) and self._values == other._values

    def __len__(self) -> int:
        return len(self._values)

    def items(self):
        return sorted(self._values.items())

    def apply(self, layers: Iterable[ScenarioLayer]) -> "EffectiveView":
        values = dict(self._values)
        names = list(self.layers)
        for layer in layers:
            values.update(layer.overrides)
            names.append(layer.name)
        return EffectiveView(values, names)

    def has(self, key: EntityKey, param: str) -> bool:
        return (key, param) in self._values

    def get(self, key: EntityKey, param: str, default=_MISSING) -> ParameterValue:
        try:
            return self._values[(key, param)]
        except KeyError:
            if default is _MISSING:
                raise Unresolved(f"{key[0]} {key[1]}: {param} is unresolved in stack {list(self.layers)}")
            return default

    def number(self, key: EntityKey, param: str, default=_MISSING, t: datetime | None = None) -> float:
        v = self.get(key, param, None)
        if v is None:
            if default is _MISSING:
                raise Unresolved(f"{key[0]} {key[1]}: {param} is unresolved")
            return default
        return as_float(v, t)

    def flag(self, key: EntityKey, param: str, default: bool = False) -> bool:
        v = self.get(key, param, None)
        if v is None:
            return default
        if isinstance(v, Flag):
            return v.value
        if isinstance(v, Constant):
            return bool(v.value)
        return str(getattr(v, "value", "")).lower() == "true"

    def text(self, key: EntityKey, param: str, default: str | None = None) -> str | None:
        v = self.get(key, param, None)
        if v is None:
            return default
        if isinstance(v, (Enum, Flag, Constant)):
            return str(v.value)
        raise Unresolved(f"{key[1]}: {param} is a series, text expected")

    def params_of(self, key: EntityKey) -> dict[str, ParameterValue]:
        return {p: v for (k, p), v in self._values.items() if k == key}


def compose(layers: Sequence[ScenarioLayer]) -> EffectiveView:
    return EffectiveView().apply(layers)


def layer_from_graph(graph: EntityGraph, name: str) -> ScenarioLayer:
    if name not in graph.layers:
        raise UndeclaredLayer(f"scenario layer {name!r} is not declared in the dataset")
    overrides: dict[Slot, ParameterValue] = {}
    for e in graph:
        for param, by_layer in e.parameters.items():
            if name in by_layer:
                overrides[(e.key, param)] = by_layer[name]
    return ScenarioLayer(name, overrides)


def optimistic_capex_layer(graph: EntityGraph, view: EffectiveView,
                           factor: float = DEFAULT_CAPEX_FACTOR,
                           prefixes: Sequence[str] = P2X_PREFIXES) -> ScenarioLayer:
    """Scale P2X synthesizer investment and FOM costs found in ``view``."""
    overrides: dict[Slot, ParameterValue] = {}
    for name in graph.units:
        if not name.startswith(tuple(prefixes)):
            continue
        key = ("unit", name)
        for param in ("unit_investment_cost", "fom_cost"):
            v = view.get(key, param, None)
            if isinstance(v, Constant):
                overrides[(key, param)] = Constant(v.value * factor)
    return ScenarioLayer(OPT_CAPEX, overrides)


DerivedLayer = Callable[[EntityGraph, EffectiveView, float], ScenarioLayer]
DERIVED_LAYERS: dict[str, DerivedLayer] = {
    OPT_CAPEX: lambda g, v, f: optimistic_capex_layer(g, v, f),
}


def layer_names(stack: ScenarioStack | Sequence[str]) -> tuple[str, ...]:
    return tuple(stack.layers) if isinstance(stack, ScenarioStack) else tuple(stack)


def view_for(graph: EntityGraph, stack: ScenarioStack | Sequence[str],
             capex_factor: float = DEFAULT_CAPEX_FACTOR) -> EffectiveView:
    """Compose a named stack against ``graph``; derived layers see everything below them."""
    view = EffectiveView()
    for name in layer_names(stack):
        if name in DERIVED_LAYERS and name not in graph.layers:
            layer = DERIVED_LAYERS[name](graph, view, capex_factor)
        else:
            layer = layer_from_graph(graph, name)
        view = view.apply([layer])
    return view


_COMBINE = re.compile(r"^(Inv-[A-Za-z0-9]+)-(bin|cont)$")
_ORDER_RULES = (("Tech-H2-units", "Inv-H2-on"),)


def check_stack(stack: ScenarioStack | Sequence[str]) -> list[Diagnostic]:
    """Ordering rules: ``Inv-X-bin``/``Inv-X-cont`` need ``Inv-X-on`` earlier in the stack."""
    names = layer_names(stack)
    out = []
    for i, name in enumerate(names):
        m = _COMBINE.match(name)
        if m and f"{m.group(1)}-on" not in names[:i]:
            out.append(Diagnostic("error", name, f"layer must be combined with {m.group(1)}-on listed before it"))
    for first, second in _ORDER_RULES:
        if first in names and second in names and names.index(first) > names.index(second):
            out.append(Diagnostic("error", first, f"layer must be placed before {second}"))
    return out


_COMMON_HEAD = ("Base", "Inv", "Tech-H2-units", "Inv-H2-on")
_MEOH = ("Inv-MeOH-on", "Inv-MeOH-bin")
_NH3 = ("Inv-NH3-on", "Inv-NH3-bin")
_PREMIUM = {0: (), 1: ("Premium-1.5x",), 2: ("Premium-2x",)}


def _study_stack(idx: int) -> ScenarioStack:
    group, price = divmod(idx, 3)
    layers = list(_COMMON_HEAD) + ["Inv-H2-int"]
    if group == 2:
        layers += _MEOH
    elif group == 3:
        layers += _NH3
    if group >= 1:
        layers.append("Inv-PPA")
    layers += ["Inv-storage-compress", "Mod-UC", *_PREMIUM[price], "Solver-Gurobi", "Year"]
    return ScenarioStack(f"S{idx}", tuple(layers))


def builtin_scenarios() -> dict[str, ScenarioStack]:
    """S0-S11, the optimistic-CAPEX variants and the continuous templates a/b."""
    out = {f"S{i}": _study_stack(i) for i in range(12)}
    out["S6-opt"] = out["S6"].extended([OPT_CAPEX], "S6-opt")
    out["S9-opt"] = out["S9"].extended([OPT_CAPEX], "S9-opt")
    cont = [*_COMMON_HEAD, "Inv-H2-cont", "Inv-storage-compress"]
    out["a"] = ScenarioStack("a", tuple(cont + ["Mod-UC", "Solver-Gurobi", "Year"]))
    out["b"] = ScenarioStack("b", tuple(cont + ["Solver-Gurobi", "Year"]))
    return out


def get_stack(name: str, extra_layers: Sequence[str] = ()) -> ScenarioStack:
    """Built-in stack by name, or an ad-hoc ``+``-joined layer list."""
    stacks = builtin_scenarios()
    if name in stacks:
        base = stacks[name]
    else:
        base = ScenarioStack(name, tuple(p for p in name.split("+") if p))
    return base.extended(extra_layers) if extra_layers else base
