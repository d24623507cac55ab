"""Flat CSV dataset format.

One header ``class,entity,parameter,scenario,time,value``. Relationship entities
are written ``unit|node1`` or ``unit|node1|node2``; group membership rows use
class ``group__node`` with entity ``group|node``. A row with an empty parameter
only declares the entity. Values prefixed ``ts:`` name a ``timestamp,value``
file in the time-series directory.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from datetime import datetime
from pathlib import Path
from typing import Callable, Iterable, Sequence

from hubopt.errors import DuplicateParameter, IoFailure, MalformedSeries, UnknownEntity
from hubopt.model.graph import (
    ALL_CLASSES,
    RELATIONSHIP_KINDS,
    Entity,
    EntityGraph,
    EntityKey,
    Group,
    Node,
    Relationship,
    Unit,
)
from hubopt.model.values import (
    ParameterValue,
    TimeSeries,
    format_scalar,
    parse_scalar,
    parse_time,
)

HEADER = ("class", "entity", "parameter", "scenario", "time", "value")
DEFAULT_LAYER = "Base"

Row = Sequence[str]


def read_series(path: Path | str, source: str | None = None) -> TimeSeries:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read time series {path}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header[:2]] != ["timestamp", "value"]:
        raise MalformedSeries(f"{path.name}: expected header 'timestamp,value'")
    times, values = [], []
    for lineno, rec in enumerate(reader, start=2):
        if not rec or not "".join(rec).strip():
            continue
        try:
            times.append(parse_time(rec[0]))
            values.append(float(rec[1]))
        except (ValueError, IndexError) as exc:
            raise MalformedSeries(f"{path.name}:{lineno}: {exc}") from exc
    return TimeSeries(tuple(times), tuple(values), source=source or path.name)


def write_series(series: TimeSeries, path: Path | str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("timestamp", "value"))
        for t, v in zip(series.times, series.values):
            w.writerow((t.isoformat(), repr(float(v))))


def _split_relationship(kind: str, name: str) -> tuple[str, str, str | None]:
    parts = name.split("|")
    if kind == "unit__node__node":
        if len(parts) != 3:
            raise UnknownEntity(f"{kind} {name!r} needs unit|node1|node2")
        return parts[0], parts[1], parts[2]
    if len(parts) != 2:
        raise UnknownEntity(f"{kind} {name!r} needs unit|node")
    return parts[0], parts[1], None


def load_rows(rows: Iterable[Row], ts_loader: Callable[[str], TimeSeries] | None = None) -> EntityGraph:
    """Build a linked graph from raw rows; row order never matters."""
    declared: set[EntityKey] = set()
    layers: set[str] = set()
    scalars: dict[tuple[EntityKey, str, str], ParameterValue] = {}
    points: dict[tuple[EntityKey, str, str], dict[datetime, float]] = defaultdict(dict)
    members: dict[str, set[str]] = defaultdict(set)
    cache: dict[str, TimeSeries] = {}

    for raw in rows:
        rec = [str(f).strip() for f in raw] + [""] * (6 - len(raw))
        cls, name, param, layer, time, value = rec[:6]
        if not cls or cls.startswith("#"):
            continue
        if cls not in ALL_CLASSES:
            raise UnknownEntity(f"unknown entity class {cls!r}")
        if cls == "scenario":
            layers.add(name)
            continue
        if cls == "group__node":
            g, _, n = name.partition("|")
            members[g].add(n)
            continue
        key = (cls, name)
        declared.add(key)
        if not param:
            continue
        layer = layer or DEFAULT_LAYER
        layers.add(layer)
        slot = (key, param, layer)
        if time:
            t = parse_time(time)
            if slot in scalars:
                raise DuplicateParameter(f"{cls} {name} {param} [{layer}] given as scalar and series")
            if t in points[slot]:
                raise DuplicateParameter(f"{cls} {name} {param} [{layer}] repeats time {time}")
            points[slot][t] = float(value)
            continue
        if slot in scalars or slot in points:
            raise DuplicateParameter(f"{cls} {name} {param} [{layer}] defined twice")
        if value.startswith("ts:"):
            fname = value[3:].strip()
            if ts_loader is None:
                raise IoFailure(f"{fname}: no time-series directory given")
            if fname not in cache:
                cache[fname] = ts_loader(fname)
            scalars[slot] = cache[fname]
        else:
            scalars[slot] = parse_scalar(value)

    for g in members:
        declared.add(("group", g))

    params: dict[EntityKey, dict[str, dict[str, ParameterValue]]] = defaultdict(lambda: defaultdict(dict))
    for (key, param, layer), v in scalars.items():
        params[key][param][layer] = v
    for (key, param, layer), pts in points.items():
        ts = sorted(pts)
        params[key][param][layer] = TimeSeries(tuple(ts), tuple(pts[t] for t in ts))

    entities: dict[EntityKey, Entity] = {}
    names_of = lambda c: {n for (k, n) in declared if k == c}  # noqa: E731
    units, nodes, groups = names_of("unit"), names_of("node"), names_of("group")
    ucs = names_of("user_constraint")

    for g, ms in members.items():
        missing = sorted(ms - nodes)
        if missing:
            raise UnknownEntity(f"group {g} references undeclared node(s) {missing}")

    for key in sorted(declared):
        cls, name = key
        p = {k: dict(v) for k, v in params.get(key, {}).items()}
        if cls == "unit":
            entities[key] = Unit(name=name, parameters=p)
        elif cls == "node":
            entities[key] = Node(name=name, parameters=p)
        elif cls == "group":
            entities[key] = Group(name=name, parameters=p, members=frozenset(members.get(name, ())))
        elif cls in RELATIONSHIP_KINDS:
            u, n1, n2 = _split_relationship(cls, name)
            if u not in units:
                raise UnknownEntity(f"{cls} {name}: unit {u!r} is not declared")
            for n in (n1, n2):
                if n is not None and n not in nodes and n not in groups:
                    raise UnknownEntity(f"{cls} {name}: node {n!r} is not declared")
            entities[key] = Relationship(cls=cls, name=name, parameters=p, unit=u, node1=n1, node2=n2)
        elif cls == "unit__user_constraint":
            u, _, uc = name.partition("|")
            if u not in units:
                raise UnknownEntity(f"{cls} {name}: unit {u!r} is not declared")
            if uc not in ucs:
                raise UnknownEntity(f"{cls} {name}: user_constraint {uc!r} is not declared")
            entities[key] = Entity(cls=cls, name=name, parameters=p)
        else:
            entities[key] = Entity(cls=cls, name=name, parameters=p)

    return EntityGraph(entities=entities, layers=tuple(sorted(layers)))


def load_dataset(model_file: Path | str, timeseries_dir: Path | str | None = None) -> EntityGraph:
    model_file = Path(model_file)
    ts_dir = Path(timeseries_dir) if timeseries_dir is not None else model_file.parent / "ts"
    try:
        text = model_file.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {model_file}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        return EntityGraph()
    if tuple(h.strip() for h in header) != HEADER:
        raise IoFailure(f"{model_file.name}: header must be {','.join(HEADER)}")
    return load_rows(reader, lambda fname: read_series(ts_dir / fname, source=fname))


def dump_rows(graph: EntityGraph) -> list[tuple[str, ...]]:
    """Canonical row list; inverse of :func:`load_rows`."""
    out: list[tuple[str, ...]] = [("scenario", layer, "", "", "", "") for layer in graph.layers]
    for e in graph:
        out.append((e.cls, e.name, "", "", "", ""))
        if isinstance(e, Group):
            out.extend(("group__node", f"{e.name}|{m}", "", "", "", "") for m in sorted(e.members))
        for param in sorted(e.parameters):
            for layer in sorted(e.parameters[param]):
                v = e.parameters[param][layer]
                if isinstance(v, TimeSeries):
                    if v.source is not None:
                        out.append((e.cls, e.name, param, layer, "", f"ts:{v.source}"))
                    else:
                        out.extend((e.cls, e.name, param, layer, t.isoformat(), repr(float(x)))
                                   for t, x in zip(v.times, v.values))
                else:
                    out.append((e.cls, e.name, param, layer, "", format_scalar(v)))
    return out


def write_dataset(graph: EntityGraph, model_file: Path | str, timeseries_dir: Path | str | None = None) -> None:
    with open(model_file, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        w.writerows(dump_rows(graph))
    if timeseries_dir is None:
        return
    ts_dir = Path(timeseries_dir)
    ts_dir.mkdir(parents=True, exist_ok=True)
    written: set[str] = set()
    for e in graph:
        for by_layer in e.parameters.values():
            for v in by_layer.values():
                if isinstance(v, TimeSeries) and v.source and v.source not in written:
                    write_series(v, ts_dir / v.source)
                    written.add(v.source)
