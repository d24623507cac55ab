from __future__ import annotations

from datetime import datetime
from typing import Sequence

from hubopt.errors import Unresolved
from hubopt.model.graph import EntityGraph, EntityKey
from hubopt.model.values import Constant, Enum, Flag, ParameterValue, TimeSeries


def _layer_names(stack) -> Sequence[str]:
    return stack.layers if hasattr(stack, "layers") else stack


def lookup(graph: EntityGraph, entity: str | EntityKey, parameter: str, stack) -> ParameterValue:
    """Raw value from the last layer of ``stack`` that defines it."""
    e = graph.get(entity)
    by_layer = e.parameters.get(parameter, {})
    for layer in reversed(list(_layer_names(stack))):
        if layer in by_layer:
            return by_layer[layer]
    raise Unresolved(f"{e.cls} {e.name}: {parameter} not defined in any active layer")


def resolve(graph: EntityGraph, entity: str | EntityKey, parameter: str, stack,
            t: datetime | None = None) -> float | bool | str:
    """Scalar value of ``parameter`` at time ``t`` under the layer ``stack``."""
    v = lookup(graph, entity, parameter, stack)
    if isinstance(v, TimeSeries):
        if t is None:
            raise Unresolved(f"{parameter} is a time series; a timestamp is required")
        return v.at(t)
    if isinstance(v, Constant):
        return v.value
    if isinstance(v, Flag):
        return v.value
    assert isinstance(v, Enum)
    return v.value
