"""Well-formedness checks that must pass before a model is analysed."""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from flowtaint.model import PERMITTED_FLOW_PAIRS, DataFlow, Model, NodeKind

R_FLOW_PAIR = "R_FLOW_PAIR"
R_EMPTY_ASSETS = "R_EMPTY_ASSETS"
R_NO_USECASE = "R_NO_USECASE"
R_OBSTACLE_CYCLE = "R_OBSTACLE_CYCLE"
R_MIXED_REFINEMENT = "R_MIXED_REFINEMENT"
R_HUMAN_ROLE = "R_HUMAN_ROLE"
# Integrity rules for models built in code rather than through ingest,
# which reports the same problems as parse issues.
R_DUP_NAME = "R_DUP_NAME"
R_DANGLING_REF = "R_DANGLING_REF"
R_KIND_MISMATCH = "R_KIND_MISMATCH"
R_TASK_PARTICIPANTS = "R_TASK_PARTICIPANTS"

RULES = (
    R_FLOW_PAIR,
    R_EMPTY_ASSETS,
    R_NO_USECASE,
    R_OBSTACLE_CYCLE,
    R_MIXED_REFINEMENT,
    R_HUMAN_ROLE,
    R_DUP_NAME,
    R_DANGLING_REF,
    R_KIND_MISMATCH,
    R_TASK_PARTICIPANTS,
)


@dataclass(frozen=True)
class Violation:
    subject: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule} {self.subject}: {self.message}"


def check_data_flow(flow: DataFlow) -> list[Violation]:
    """Check one flow against the data flow well-formedness predicate."""
    out = []
    if not flow.assets:
        out.append(Violation(str(flow), R_EMPTY_ASSETS, "data flow carries no assets"))
    if (flow.from_type, flow.to_type) not in PERMITTED_FLOW_PAIRS:
        out.append(Violation(
            str(flow), R_FLOW_PAIR,
            f"{flow.from_type.value} -> {flow.to_type.value} is not a permitted flow",
        ))
    return sorted(out, key=lambda v: v.rule)


class _Collector:
    def __init__(self) -> None:
        self._items: list[tuple[int, int, str, int, Violation]] = []

    def add(self, section: int, index: int, subject: str, rule: str, message: str) -> None:
        self._items.append((section, index, rule, len(self._items), Violation(subject, rule, message)))

    def result(self) -> list[Violation]:
        return [item[-1] for item in sorted(self._items)]


def check_model(model: Model) -> list[Violation]:
    """Run every integrity rule over ``model``.

    Violations come back ordered by the element's position in the document
    (collections in canonical order), then by rule code.
    """
    c = _Collector()
    roles = model.role_index
    personas = model.persona_index
    assets = model.asset_index
    tasks = model.task_index
    goals = model.goal_index
    obstacles = model.obstacle_index
    nodes = model.node_index

    def dangling(section, index, subject, names, known, what):
        for name in names:
            if name not in known:
                c.add(section, index, subject, R_DANGLING_REF, f"unknown {what} {name!r}")

    collections = (
        model.assets, model.roles, model.personas, model.attackers, model.tasks,
        model.use_cases, model.goals, model.obstacles, model.nodes,
    )
    for section, items in enumerate(collections):
        seen = set()
        for i, item in enumerate(items):
            if item.name in seen:
                c.add(section, i, item.name, R_DUP_NAME, f"name {item.name!r} is used twice")
            seen.add(item.name)

    for i, p in enumerate(model.personas):
        dangling(2, i, p.name, p.roles, roles, "role")
    for i, a in enumerate(model.attackers):
        dangling(3, i, a.name, a.roles, roles, "role")
    for i, t in enumerate(model.tasks):
        dangling(4, i, t.name, t.personas, personas, "persona")
        dangling(4, i, t.name, sorted(t.assets), assets, "asset")
        if not t.participants:
            c.add(4, i, t.name, R_TASK_PARTICIPANTS, "task has no participating personas")
        elif len(set(t.personas)) != len(t.personas):
            c.add(4, i, t.name, R_TASK_PARTICIPANTS, "a persona participates more than once")
    for i, uc in enumerate(model.use_cases):
        dangling(5, i, uc.name, uc.actors, roles, "role")
        dangling(5, i, uc.name, uc.tasks, tasks, "task")
        dangling(5, i, uc.name, uc.exceptions, obstacles, "obstacle")
    for i, o in enumerate(model.obstacles):
        dangling(7, i, o.name, sorted(o.concerns), assets, "asset")
        dangling(7, i, o.name, o.obstructs, goals, "goal")
        dangling(7, i, o.name, o.resolved_by, goals, "goal")
        dangling(7, i, o.name, o.children, obstacles, "obstacle")
        if o.or_children and o.and_children:
            c.add(7, i, o.name, R_MIXED_REFINEMENT, "obstacle is both or-refined and and-refined")
    cycles = _cycle_membership(model)
    for i, o in enumerate(model.obstacles):
        if o.name in cycles:
            c.add(7, i, o.name, R_OBSTACLE_CYCLE,
                  "obstacle refinement cycle through " + ", ".join(cycles[o.name]))

    for i, n in enumerate(model.nodes):
        if n.role is not None:
            if n.kind is not NodeKind.entity:
                c.add(8, i, n.name, R_HUMAN_ROLE, f"a {n.kind.value} cannot be bound to a role")
            elif n.role not in roles:
                c.add(8, i, n.name, R_HUMAN_ROLE, f"bound to unknown role {n.role!r}")
        if n.kind is NodeKind.process and n.name not in model.use_case_index:
            c.add(8, i, n.name, R_NO_USECASE, "process has no use case of the same name")

    seen_flows = set()
    for i, df in enumerate(model.data_flows):
        subject = str(df)
        for v in check_data_flow(df):
            c.add(9, i, subject, v.rule, v.message)
        if df.key in seen_flows:
            c.add(9, i, subject, R_DUP_NAME, "duplicate (label, from, to)")
        seen_flows.add(df.key)
        for end, name, kind in (("from", df.from_name, df.from_type), ("to", df.to_name, df.to_type)):
            node = nodes.get(name)
            if node is None:
                c.add(9, i, subject, R_DANGLING_REF, f"unknown {end} node {name!r}")
            elif node.kind is not kind:
                c.add(9, i, subject, R_KIND_MISMATCH,
                      f"{end} node {name!r} is a {node.kind.value}, flow says {kind.value}")
        dangling(9, i, subject, sorted(df.assets), assets, "asset")

    return c.result()


def _refinement_graph(model: Model) -> nx.DiGraph:
    g = nx.DiGraph()
    for o in model.obstacles:
        g.add_node(o.name)
        for child in o.children:
            g.add_edge(o.name, child)
    return g


def _cycle_membership(model: Model) -> dict[str, list[str]]:
    """Map each obstacle on a refinement cycle to its cycle's members."""
    g = _refinement_graph(model)
    order = {}
    for i, o in enumerate(model.obstacles):
        order.setdefault(o.name, i)
    out = {}
    for comp in nx.strongly_connected_components(g):
        if len(comp) == 1 and not any(g.has_edge(n, n) for n in comp):
            continue
        members = sorted(comp, key=lambda n: (order.get(n, len(order)), n))
        for n in comp:
            out[n] = members
    return out


def is_valid(model: Model) -> bool:
    return not check_model(model)
