"""Load model documents into :class:`~flowtaint.model.Model` objects.

A model document is UTF-8 YAML (JSON is accepted too, being a YAML
subset) with optional top-level collections::

    name: optional model name
    assets:      [{name, shortcode}]
    roles:       [{name}]
    personas:    [{name, roles}]
    attackers:   [{name, roles, motivations, capabilities: [{name, value}]}]
    tasks:       [{name, participants: [{persona, demand, goalconflict}], assets}]
    usecases:    [{name, actors, contextualisingtasks, exceptions}]
    goals:       [{name}]
    obstacles:   [{name, concerns, obstructs, resolvedby, orchildren, andchildren}]
    nodes:       [{name, kind, roleref}]
    dataflows:   [{label, from, to, assets}]
    trustboundaries: [{name, nodes}]

References are exact, case-sensitive names. Loading collects every issue
it can find before failing.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import yaml

from flowtaint.model import (
    Asset,
    Attacker,
    Capability,
    DataFlow,
    Goal,
    Model,
    Node,
    NodeKind,
    Obstacle,
    Participant,
    Persona,
    Role,
    Task,
    TrustBoundary,
    UseCase,
    Value,
)

E_SYNTAX = "E_SYNTAX"
E_DANGLING_REF = "E_DANGLING_REF"
E_DUP_NAME = "E_DUP_NAME"
E_BAD_ENUM = "E_BAD_ENUM"
E_KIND_MISMATCH = "E_KIND_MISMATCH"

ISSUE_CODES = (E_SYNTAX, E_DANGLING_REF, E_DUP_NAME, E_BAD_ENUM, E_KIND_MISMATCH)

COLLECTIONS = (
    "assets",
    "roles",
    "personas",
    "attackers",
    "tasks",
    "usecases",
    "goals",
    "obstacles",
    "nodes",
    "dataflows",
    "trustboundaries",
)

_FIELDS = {
    "assets": {"name", "shortcode"},
    "roles": {"name"},
    "personas": {"name", "roles"},
    "attackers": {"name", "roles", "motivations", "capabilities"},
    "tasks": {"name", "participants", "assets"},
    "usecases": {"name", "actors", "contextualisingtasks", "exceptions"},
    "goals": {"name"},
    "obstacles": {"name", "concerns", "obstructs", "resolvedby", "orchildren", "andchildren"},
    "nodes": {"name", "kind", "roleref"},
    "dataflows": {"label", "from", "to", "assets", "fromtype", "totype"},
    "trustboundaries": {"name", "nodes"},
}


@dataclass(frozen=True)
class ParseIssue:
    path: str
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.code}: {self.message}"


class ModelParseError(ValueError):
    """Raised when a document cannot be turned into a model.

    ``issues`` holds every problem found, in document order.
    """

    def __init__(self, issues: list[ParseIssue]):
        self.issues = list(issues)
        lines = "\n".join(f"  {i}" for i in self.issues)
        super().__init__(f"{len(self.issues)} issue(s) in model document:\n{lines}")


class _Loader:
    def __init__(self) -> None:
        self.issues: list[ParseIssue] = []

    def issue(self, path: str, code: str, message: str) -> None:
        self.issues.append(ParseIssue(path, code, message))

    # -- scalar and list helpers ------------------------------------------

    def string(self, rec: dict, key: str, path: str, required: bool = True) -> str | None:
        if key not in rec or rec[key] is None:
            if required:
                self.issue(path, E_SYNTAX, f"missing required field {key!r}")
            return None
        value = rec[key]
        if not isinstance(value, str):
            self.issue(f"{path}.{key}", E_SYNTAX, f"expected a string, got {type(value).__name__}")
            return None
        return value

    def strings(self, rec: dict, key: str, path: str) -> list[tuple[str, str]]:
        """Return (item path, value) pairs for a list-of-strings field."""
        value = rec.get(key)
        if value is None:
            return []
        if not isinstance(value, list):
            self.issue(f"{path}.{key}", E_SYNTAX, "expected a list")
            return []
        out = []
        for i, item in enumerate(value):
            if not isinstance(item, str):
                self.issue(f"{path}.{key}[{i}]", E_SYNTAX, f"expected a string, got {type(item).__name__}")
                continue
            out.append((f"{path}.{key}[{i}]", item))
        return out

    def enum(self, enum_cls, rec: dict, key: str, path: str):
        raw = self.string(rec, key, path)
        if raw is None:
            return None
        try:
            return enum_cls(raw)
        except ValueError:
            allowed = ", ".join(m.value for m in enum_cls)
            self.issue(f"{path}.{key}", E_BAD_ENUM, f"{raw!r} is not one of {allowed}")
            return None

    def refs(self, rec: dict, key: str, path: str, known: dict, what: str) -> tuple[str, ...]:
        out = []
        for item_path, name in self.strings(rec, key, path):
            if name not in known:
                self.issue(item_path, E_DANGLING_REF, f"unknown {what} {name!r}")
            elif name in out:
                self.issue(item_path, E_DUP_NAME, f"{what} {name!r} listed twice")
            else:
                out.append(name)
        return tuple(out)

    def records(self, doc: dict, key: str) -> list[tuple[str, dict]]:
        value = doc.get(key)
        if value is None:
            return []
        if not isinstance(value, list):
            self.issue(key, E_SYNTAX, "expected a list of records")
            return []
        out = []
        allowed = _FIELDS[key]
        for i, rec in enumerate(value):
            path = f"{key}[{i}]"
            if not isinstance(rec, dict):
                self.issue(path, E_SYNTAX, "expected a record")
                continue
            for field in rec:
                if field not in allowed:
                    self.issue(f"{path}.{field}" if isinstance(field, str) else path,
                               E_SYNTAX, f"unknown field {field!r}")
            out.append((path, rec))
        return out

    def named(self, doc: dict, key: str, build: Callable[[str, str, dict], Any]) -> dict:
        """Build a name-indexed collection, flagging duplicate names."""
        out: dict[str, Any] = {}
        for path, rec in self.records(doc, key):
            name = self.string(rec, "name", path)
            if name is None:
                continue
            if name in out:
                self.issue(f"{path}.name", E_DUP_NAME, f"duplicate name {name!r} in {key}")
                continue
            item = build(name, path, rec)
            if item is not None:
                out[name] = item
        return out

    # -- whole document -----------------------------------------------------

    def load(self, text: str, default_name: str) -> Model | None:
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            self.issue("<document>", E_SYNTAX, str(exc).replace("\n", " "))
            return None
        if doc is None:
            doc = {}
        if not isinstance(doc, dict):
            self.issue("<document>", E_SYNTAX, "top level must be a mapping of collections")
            return None
        for key in doc:
            if key not in COLLECTIONS and key != "name":
                self.issue(str(key), E_SYNTAX, f"unknown top-level field {key!r}")
        name = self.string(doc, "name", "<document>", required=False) or default_name

        assets = self.named(doc, "assets", lambda n, p, r: Asset(n, self.string(r, "shortcode", p, required=False)))
        roles = self.named(doc, "roles", lambda n, p, r: Role(n))
        personas = self.named(doc, "personas", lambda n, p, r: Persona(n, self.refs(r, "roles", p, roles, "role")))
        attackers = self.named(doc, "attackers", lambda n, p, r: self.attacker(n, p, r, roles))
        tasks = self.named(doc, "tasks", lambda n, p, r: self.task(n, p, r, personas, assets))
        goals = self.named(doc, "goals", lambda n, p, r: Goal(n))
        # Obstacles refer to each other, so names are collected first.
        raw = doc.get("obstacles")
        obstacle_names = {
            rec["name"]: True
            for rec in (raw if isinstance(raw, list) else ())
            if isinstance(rec, dict) and isinstance(rec.get("name"), str)
        }
        obstacles = self.named(doc, "obstacles", lambda n, p, r: self.obstacle(n, p, r, assets, goals, obstacle_names))
        usecases = self.named(doc, "usecases", lambda n, p, r: UseCase(
            n,
            actors=self.refs(r, "actors", p, roles, "role"),
            tasks=self.refs(r, "contextualisingtasks", p, tasks, "task"),
            exceptions=self.refs(r, "exceptions", p, obstacles, "obstacle"),
        ))
        nodes = self.named(doc, "nodes", lambda n, p, r: self.node(n, p, r, roles))
        flows = self.flows(doc, nodes, assets)
        boundaries = self.named(doc, "trustboundaries", lambda n, p, r: TrustBoundary(
            n, self.refs(r, "nodes", p, nodes, "node")))

        if self.issues:
            return None
        return Model(
            name=name,
            assets=tuple(assets.values()),
            roles=tuple(roles.values()),
            personas=tuple(personas.values()),
            attackers=tuple(attackers.values()),
            tasks=tuple(tasks.values()),
            use_cases=tuple(usecases.values()),
            goals=tuple(goals.values()),
            obstacles=tuple(obstacles.values()),
            nodes=tuple(nodes.values()),
            data_flows=tuple(flows),
            trust_boundaries=tuple(boundaries.values()),
        )

    # -- per-record builders -----------------------------------------------

    def attacker(self, name: str, path: str, rec: dict, roles: dict) -> Attacker:
        capabilities = []
        raw = rec.get("capabilities")
        if raw is not None and not isinstance(raw, list):
            self.issue(f"{path}.capabilities", E_SYNTAX, "expected a list")
            raw = None
        for i, cap in enumerate(raw or ()):
            cpath = f"{path}.capabilities[{i}]"
            if not isinstance(cap, dict) or set(cap) - {"name", "value"}:
                self.issue(cpath, E_SYNTAX, "expected a record with fields name, value")
                continue
            cname = self.string(cap, "name", cpath)
            value = self.enum(Value, cap, "value", cpath)
            if cname is not None and value is not None:
                capabilities.append(Capability(cname, value))
        motivations = tuple(dict.fromkeys(m for _, m in self.strings(rec, "motivations", path)))
        return Attacker(
            name,
            roles=self.refs(rec, "roles", path, roles, "role"),
            motivations=motivations,
            capabilities=tuple(capabilities),
        )

    def task(self, name: str, path: str, rec: dict, personas: dict, assets: dict) -> Task:
        participants = []
        raw = rec.get("participants")
        if raw is not None and not isinstance(raw, list):
            self.issue(f"{path}.participants", E_SYNTAX, "expected a list")
            raw = None
        for i, part in enumerate(raw or ()):
            ppath = f"{path}.participants[{i}]"
            if not isinstance(part, dict) or set(part) - {"persona", "demand", "goalconflict"}:
                self.issue(ppath, E_SYNTAX, "expected a record with fields persona, demand, goalconflict")
                continue
            persona = self.string(part, "persona", ppath)
            demand = self.enum(Value, part, "demand", ppath)
            conflict = self.enum(Value, part, "goalconflict", ppath)
            if persona is not None and persona not in personas:
                self.issue(f"{ppath}.persona", E_DANGLING_REF, f"unknown persona {persona!r}")
                persona = None
            elif persona is not None and any(p.persona == persona for p in participants):
                self.issue(f"{ppath}.persona", E_DUP_NAME, f"persona {persona!r} participates twice")
                persona = None
            if persona is not None and demand is not None and conflict is not None:
                participants.append(Participant(persona, demand, conflict))
        return Task(name, tuple(participants), frozenset(self.refs(rec, "assets", path, assets, "asset")))

    def obstacle(self, name: str, path: str, rec: dict, assets: dict, goals: dict, obstacles: dict) -> Obstacle:
        return Obstacle(
            name,
            concerns=frozenset(self.refs(rec, "concerns", path, assets, "asset")),
            obstructs=self.refs(rec, "obstructs", path, goals, "goal"),
            resolved_by=self.refs(rec, "resolvedby", path, goals, "goal"),
            or_children=self.refs(rec, "orchildren", path, obstacles, "obstacle"),
            and_children=self.refs(rec, "andchildren", path, obstacles, "obstacle"),
        )

    def node(self, name: str, path: str, rec: dict, roles: dict) -> Node | None:
        kind = self.enum(NodeKind, rec, "kind", path)
        role = self.string(rec, "roleref", path, required=False)
        if role is not None:
            if role not in roles:
                self.issue(f"{path}.roleref", E_DANGLING_REF, f"unknown role {role!r}")
            elif kind is not None and kind is not NodeKind.entity:
                self.issue(f"{path}.roleref", E_KIND_MISMATCH, f"only entities may be bound to a role, not a {kind.value}")
        if kind is None:
            return None
        return Node(name, kind, role)

    def flows(self, doc: dict, nodes: dict, assets: dict) -> list[DataFlow]:
        out: list[DataFlow] = []
        seen: set[tuple[str, str, str]] = set()
        for path, rec in self.records(doc, "dataflows"):
            label = self.string(rec, "label", path)
            ends = []
            for end in ("from", "to"):
                name = self.string(rec, end, path)
                node = nodes.get(name) if name is not None else None
                if name is not None and node is None:
                    self.issue(f"{path}.{end}", E_DANGLING_REF, f"unknown node {name!r}")
                stated = rec.get(f"{end}type")
                if node is not None and stated is not None:
                    kind = self.enum(NodeKind, rec, f"{end}type", path)
                    if kind is not None and kind is not node.kind:
                        self.issue(f"{path}.{end}type", E_KIND_MISMATCH,
                                   f"{name!r} is a {node.kind.value}, not a {kind.value}")
                ends.append(node)
            flow_assets = self.refs(rec, "assets", path, assets, "asset")
            if label is None or None in ends:
                continue
            src, dst = ends
            key = (label, src.name, dst.name)
            if key in seen:
                self.issue(f"{path}.label", E_DUP_NAME,
                           f"duplicate flow {label!r} from {src.name!r} to {dst.name!r}")
                continue
            seen.add(key)
            out.append(DataFlow(label, src.name, dst.name, src.kind, dst.kind, frozenset(flow_assets)))
        return out


def load_model(text: str, name: str = "model") -> Model:
    """Parse a model document.

    Raises :class:`ModelParseError` listing every issue found. ``name`` is
    used when the document has no top-level ``name``.
    """
    loader = _Loader()
    model = loader.load(text, name)
    if model is None:
        raise ModelParseError(loader.issues)
    return model


def load_model_file(path: str | Path) -> Model:
    path = Path(path)
    return load_model(path.read_text(encoding="utf-8"), name=path.stem)
