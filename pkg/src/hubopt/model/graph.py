"""Entity graph: units, nodes, groups, relationships and their layered parameters."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from hubopt.errors import UnknownEntity
from hubopt.model.values import ParameterValue

OBJECT_CLASSES = ("model", "temporal_block", "unit", "node", "group", "user_constraint", "scenario")
RELATIONSHIP_KINDS = ("unit__from_node", "unit__to_node", "unit__node__node")
MEMBERSHIP_CLASSES = ("group__node", "unit__user_constraint")
ALL_CLASSES = OBJECT_CLASSES + RELATIONSHIP_KINDS + MEMBERSHIP_CLASSES

# parameter -> scenario layer -> value
Parameters = dict[str, dict[str, ParameterValue]]
EntityKey = tuple[str, str]


@dataclass(frozen=True, kw_only=True)
class Entity:
    cls: str
    name: str
    parameters: Parameters = field(default_factory=dict, compare=True)

    @property
    def key(self) -> EntityKey:
        return (self.cls, self.name)


@dataclass(frozen=True, kw_only=True)
class Unit(Entity):
    cls: str = "unit"


@dataclass(frozen=True, kw_only=True)
class Node(Entity):
    cls: str = "node"


@dataclass(frozen=True, kw_only=True)
class Group(Entity):
    cls: str = "group"
    members: frozenset[str] = frozenset()


@dataclass(frozen=True, kw_only=True)
class Relationship(Entity):
    unit: str = ""
    node1: str = ""
    node2: str | None = None

    @property
    def kind(self) -> str:
        return self.cls


def relationship_name(unit: str, node1: str, node2: str | None = None) -> str:
    return "|".join(p for p in (unit, node1, node2) if p is not None)


@dataclass(frozen=True, kw_only=True)
class EntityGraph:
    """Immutable after construction (see :func:`hubopt.model.io.load_rows`)."""

    entities: dict[EntityKey, Entity] = field(default_factory=dict)
    layers: tuple[str, ...] = ()

    # -- typed views -------------------------------------------------------
    def of_class(self, cls: str) -> dict[str, Entity]:
        return {name: e for (c, name), e in sorted(self.entities.items()) if c == cls}

    @property
    def units(self) -> dict[str, Unit]:
        return self.of_class("unit")  # type: ignore[return-value]

    @property
    def nodes(self) -> dict[str, Node]:
        return self.of_class("node")  # type: ignore[return-value]

    @property
    def groups(self) -> dict[str, Group]:
        return self.of_class("group")  # type: ignore[return-value]

    @property
    def user_constraints(self) -> dict[str, Entity]:
        return self.of_class("user_constraint")

    def relationships(self, kind: str | None = None) -> list[Relationship]:
        kinds = RELATIONSHIP_KINDS if kind is None else (kind,)
        return [e for (c, _), e in sorted(self.entities.items()) if c in kinds]  # type: ignore[misc]

    def memberships(self, cls: str) -> list[Entity]:
        return [e for (c, _), e in sorted(self.entities.items()) if c == cls]

    def __len__(self) -> int:
        return len(self.entities)

    def __iter__(self) -> Iterator[Entity]:
        for key in sorted(self.entities):
            yield self.entities[key]

    def is_empty(self) -> bool:
        return not self.entities

    # -- lookup ------------------------------------------------------------
    def key_for(self, entity: str | EntityKey) -> EntityKey:
        """Accept ``(class, name)`` or a bare name that is unambiguous."""
        if isinstance(entity, tuple):
            if entity not in self.entities:
                raise UnknownEntity(f"{entity[0]} {entity[1]!r} is not declared")
            return entity
        hits = [k for k in self.entities if k[1] == entity]
        if not hits:
            raise UnknownEntity(f"{entity!r} is not declared")
        if len(hits) > 1:
            raise UnknownEntity(f"{entity!r} is ambiguous: {sorted(hits)}")
        return hits[0]

    def get(self, entity: str | EntityKey) -> Entity:
        return self.entities[self.key_for(entity)]

    def is_group(self, name: str) -> bool:
        return ("group", name) in self.entities

    def expand(self, name: str) -> list[str]:
        """Node names behind a node-or-group endpoint."""
        g = self.entities.get(("group", name))
        if g is not None:
            return sorted(g.members)  # type: ignore[attr-defined]
        return [name]
