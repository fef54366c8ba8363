"""Domain types for contextualised data flow diagrams.

A :class:`Model` bundles a DFD (nodes and data flows) with the usability
concepts (roles, personas, tasks, attackers) and requirements concepts
(use cases, goals, obstacles) that give it context. Cross-references are
held as names; the model keeps lookup indices for the relations the
analyses query.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping


class Value(enum.Enum):
    Low = "Low"
    Medium = "Medium"
    High = "High"

    @property
    def rank(self) -> int:
        return _VALUE_RANK[self]

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, Value):
            return NotImplemented
        return self.rank < other.rank

    def __le__(self, other: object) -> bool:
        if not isinstance(other, Value):
            return NotImplemented
        return self.rank <= other.rank

    def __gt__(self, other: object) -> bool:
        if not isinstance(other, Value):
            return NotImplemented
        return self.rank > other.rank

    def __ge__(self, other: object) -> bool:
        if not isinstance(other, Value):
            return NotImplemented
        return self.rank >= other.rank


_VALUE_RANK = {Value.Low: 0, Value.Medium: 1, Value.High: 2}


class NodeKind(enum.Enum):
    entity = "entity"
    process = "process"
    datastore = "datastore"


# (fromType, toType) pairs a data flow may connect.
PERMITTED_FLOW_PAIRS = frozenset(
    {
        (NodeKind.entity, NodeKind.process),
        (NodeKind.process, NodeKind.entity),
        (NodeKind.datastore, NodeKind.process),
        (NodeKind.process, NodeKind.datastore),
        (NodeKind.process, NodeKind.process),
    }
)

PRODUCTIVITY = "Productivity"
# Capability names that count as "Low Time" for the pre-process check.
TIME_CAPABILITIES = frozenset({"Time", "Resources/Personnel and Time"})


class ModelLookupError(LookupError):
    """A name could not be resolved against the model."""


@dataclass(frozen=True)
class Node:
    name: str
    kind: NodeKind
    role: str | None = None

    @property
    def is_human(self) -> bool:
        return self.kind is NodeKind.entity and self.role is not None


@dataclass(frozen=True)
class Asset:
    name: str
    short_code: str | None = None


@dataclass(frozen=True)
class DataFlow:
    label: str
    from_name: str
    to_name: str
    from_type: NodeKind
    to_type: NodeKind
    assets: frozenset[str]

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.label, self.from_name, self.to_name)

    def __str__(self) -> str:
        return f"{self.label} ({self.from_name} -> {self.to_name})"


@dataclass(frozen=True)
class Role:
    name: str


@dataclass(frozen=True)
class Persona:
    name: str
    roles: tuple[str, ...] = ()


@dataclass(frozen=True)
class Capability:
    name: str
    value: Value


@dataclass(frozen=True)
class Attacker:
    name: str
    roles: tuple[str, ...] = ()
    motivations: tuple[str, ...] = ()
    capabilities: tuple[Capability, ...] = ()

    @property
    def is_productivity_driven(self) -> bool:
        return PRODUCTIVITY in self.motivations

    @property
    def has_low_time(self) -> bool:
        return any(
            c.name in TIME_CAPABILITIES and c.value is Value.Low
            for c in self.capabilities
        )


@dataclass(frozen=True)
class Participant:
    persona: str
    demand: Value
    goal_conflict: Value


@dataclass(frozen=True)
class Task:
    name: str
    participants: tuple[Participant, ...]
    assets: frozenset[str] = frozenset()

    @property
    def personas(self) -> tuple[str, ...]:
        return tuple(p.persona for p in self.participants)

    @property
    def demands(self) -> frozenset[Value]:
        return frozenset(p.demand for p in self.participants)

    @property
    def goal_conflicts(self) -> frozenset[Value]:
        return frozenset(p.goal_conflict for p in self.participants)


@dataclass(frozen=True)
class UseCase:
    name: str
    actors: tuple[str, ...] = ()
    tasks: tuple[str, ...] = ()
    exceptions: tuple[str, ...] = ()


@dataclass(frozen=True)
class Goal:
    name: str


@dataclass(frozen=True)
class Obstacle:
    name: str
    concerns: frozenset[str] = frozenset()
    obstructs: tuple[str, ...] = ()
    resolved_by: tuple[str, ...] = ()
    or_children: tuple[str, ...] = ()
    and_children: tuple[str, ...] = ()

    @property
    def children(self) -> tuple[str, ...]:
        return self.or_children + self.and_children


@dataclass(frozen=True)
class TrustBoundary:
    """Decorative grouping of nodes; carries no analysis semantics."""

    name: str
    nodes: tuple[str, ...] = ()


def _index(items: Iterable) -> dict:
    out: dict = {}
    for item in items:
        out.setdefault(item.name, item)
    return out


@dataclass(frozen=True)
class Model:
    """An immutable contextualised DFD.

    Collections keep document order. The model itself does not check its
    invariants; run :func:`flowtaint.validation.check_model` for that.
    """

    name: str = "model"
    assets: tuple[Asset, ...] = ()
    roles: tuple[Role, ...] = ()
    personas: tuple[Persona, ...] = ()
    attackers: tuple[Attacker, ...] = ()
    tasks: tuple[Task, ...] = ()
    use_cases: tuple[UseCase, ...] = ()
    goals: tuple[Goal, ...] = ()
    obstacles: tuple[Obstacle, ...] = ()
    nodes: tuple[Node, ...] = ()
    data_flows: tuple[DataFlow, ...] = ()
    trust_boundaries: tuple[TrustBoundary, ...] = ()

    # Indices. On duplicate names the first occurrence wins; validation
    # reports the duplicates.

    @cached_property
    def node_index(self) -> Mapping[str, Node]:
        return _index(self.nodes)

    @cached_property
    def asset_index(self) -> Mapping[str, Asset]:
        return _index(self.assets)

    @cached_property
    def role_index(self) -> Mapping[str, Role]:
        return _index(self.roles)

    @cached_property
    def persona_index(self) -> Mapping[str, Persona]:
        return _index(self.personas)

    @cached_property
    def attacker_index(self) -> Mapping[str, Attacker]:
        return _index(self.attackers)

    @cached_property
    def task_index(self) -> Mapping[str, Task]:
        return _index(self.tasks)

    @cached_property
    def use_case_index(self) -> Mapping[str, UseCase]:
        return _index(self.use_cases)

    @cached_property
    def goal_index(self) -> Mapping[str, Goal]:
        return _index(self.goals)

    @cached_property
    def obstacle_index(self) -> Mapping[str, Obstacle]:
        return _index(self.obstacles)

    @cached_property
    def _out_flows(self) -> Mapping[str, tuple[DataFlow, ...]]:
        out: dict[str, list[DataFlow]] = {}
        for df in self.data_flows:
            out.setdefault(df.from_name, []).append(df)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def _role_attackers(self) -> Mapping[str, tuple[Attacker, ...]]:
        out: dict[str, list[Attacker]] = {}
        for a in self.attackers:
            for r in dict.fromkeys(a.roles):
                out.setdefault(r, []).append(a)
        return {k: tuple(v) for k, v in out.items()}

    def node(self, name: str) -> Node:
        try:
            return self.node_index[name]
        except KeyError:
            raise ModelLookupError(f"no node named {name!r}") from None

    def obstacle(self, name: str) -> Obstacle:
        try:
            return self.obstacle_index[name]
        except KeyError:
            raise ModelLookupError(f"no obstacle named {name!r}") from None

    @property
    def entities(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.kind is NodeKind.entity)

    def attackers_for_role(self, role: str) -> tuple[Attacker, ...]:
        return self._role_attackers.get(role, ())

    @property
    def attacker_roles(self) -> frozenset[str]:
        return frozenset(self._role_attackers)


def node_flows(model: Model, node: Node | str) -> list[DataFlow]:
    """Data flows leaving ``node``, in document order."""
    name = node if isinstance(node, str) else node.name
    return list(model._out_flows.get(name, ()))


def process_for_name(model: Model, name: str) -> UseCase:
    """Resolve the use case bound to the process node called ``name``.

    Raises :class:`ModelLookupError` when there is no process node of that
    name or no use case shares its name.
    """
    node = model.node_index.get(name)
    if node is None or node.kind is not NodeKind.process:
        raise ModelLookupError(f"{name!r} is not a process node")
    try:
        return model.use_case_index[name]
    except KeyError:
        raise ModelLookupError(f"process {name!r} has no use case") from None
