from hubopt.model.graph import (
    Entity,
    EntityGraph,
    EntityKey,
    Group,
    Node,
    Relationship,
    Unit,
    relationship_name,
)
from hubopt.model.io import dump_rows, load_dataset, load_rows, read_series, write_dataset
from hubopt.model.resolve import lookup, resolve
from hubopt.model.temporal import TemporalBlock, make_blocks
from hubopt.model.validate import Diagnostic, validate_graph
from hubopt.model.values import Constant, Enum, Flag, ParameterValue, Sense, TimeSeries, parse_duration

__all__ = [
    "Constant", "Diagnostic", "Entity", "EntityGraph", "EntityKey", "Enum", "Flag", "Group", "Node",
    "ParameterValue", "Relationship", "Sense", "TemporalBlock", "TimeSeries", "Unit", "dump_rows",
    "load_dataset", "load_rows", "lookup", "make_blocks", "parse_duration", "read_series",
    "relationship_name", "resolve", "validate_graph", "write_dataset",
]
