"""Enumerate data flow sequences by depth-first traversal from entities."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from flowtaint.model import DataFlow, Model, Node, node_flows


class VisitedScope(enum.Enum):
    """How long the visited set lives during :func:`enumerate_sequences`.

    ``GLOBAL`` keeps one set across every root entity, so a later entity
    whose first flow reaches already-explored nodes yields a short
    sequence. ``PER_ROOT`` starts each entity with an empty set.
    """

    GLOBAL = "global"
    PER_ROOT = "per-root"


@dataclass(frozen=True)
class FlowSequence:
    root: str
    flows: tuple[DataFlow, ...]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(df.label for df in self.flows)

    def __len__(self) -> int:
        return len(self.flows)

    def __str__(self) -> str:
        return "<" + ", ".join(self.labels) + ">"


@dataclass
class TraversalState:
    all_seqs: list[FlowSequence] = field(default_factory=list)
    visited: set[str] = field(default_factory=set)
    _seen: set[tuple[int, ...]] = field(default_factory=set, repr=False)

    def append(self, root: str, flows: tuple[DataFlow, ...]) -> None:
        # Keyed on object identity: hashing long tuples of dataclasses
        # dominates the walk otherwise. Flows are owned by the model, so
        # identities are stable for the lifetime of the state.
        key = tuple(map(id, flows))
        if key not in self._seen:
            self._seen.add(key)
            self.all_seqs.append(FlowSequence(root, flows))


def data_flows(
    state: TraversalState,
    model: Model,
    current: Node | str,
    prefix: tuple[DataFlow, ...] = (),
    root: str | None = None,
) -> TraversalState:
    """Depth-first walk from ``current``, appending finished sequences.

    A sequence is finished when it reaches a node with no outgoing flows
    or a node already in ``state.visited``. The walk uses an explicit
    stack, so deep graphs do not hit the recursion limit; the order of
    appended sequences is the same as the recursive formulation.
    """
    start = current if isinstance(current, str) else current.name
    if root is None:
        root = prefix[0].from_name if prefix else start

    # Each frame: (prefix leading to the node, iterator over its out-flows).
    stack: list[tuple[tuple[DataFlow, ...], object]] = []

    def enter(name: str, pre: tuple[DataFlow, ...]) -> None:
        state.visited.add(name)
        dfs = node_flows(model, name)
        if not dfs:
            if pre:
                state.append(root, pre)
        else:
            stack.append((pre, iter(dfs)))

    enter(start, tuple(prefix))
    while stack:
        pre, it = stack[-1]
        df = next(it, None)
        if df is None:
            stack.pop()
            continue
        new_prefix = pre + (df,)
        if df.to_name in state.visited:
            state.append(root, new_prefix)
        else:
            enter(df.to_name, new_prefix)
    return state


def enumerate_sequences(
    model: Model, scope: VisitedScope | str = VisitedScope.GLOBAL
) -> list[FlowSequence]:
    """Unique flow sequences starting at each entity, in document order."""
    scope = VisitedScope(scope)
    state = TraversalState()
    for entity in model.entities:
        if scope is VisitedScope.PER_ROOT:
            state.visited = set()
        data_flows(state, model, entity, (), root=entity.name)
    return state.all_seqs
