"""Independent reference implementations used to cross-check production code.

Each oracle is written directly from the declarative definition and shares
no code path with the package beyond the model types.
"""

from __future__ import annotations

from flowtaint.model import DataFlow, Model, NodeKind, Value


def recursive_sequences(model: Model, per_root: bool = False) -> list[tuple[DataFlow, ...]]:
    """Plain recursive depth-first enumeration with a visited set."""
    out_flows: dict[str, list[DataFlow]] = {}
    for df in model.data_flows:
        out_flows.setdefault(df.from_name, []).append(df)

    all_seqs: list[tuple[DataFlow, ...]] = []
    visited: set[str] = set()

    def walk(node: str, prefix: tuple[DataFlow, ...]) -> None:
        visited.add(node)
        dfs = out_flows.get(node, [])
        if not dfs:
            if prefix:
                all_seqs.append(prefix)
            return
        for df in dfs:
            new_prefix = prefix + (df,)
            if df.to_name in visited:
                all_seqs.append(new_prefix)
            else:
                walk(df.to_name, new_prefix)

    for node in model.nodes:
        if node.kind is NodeKind.entity:
            if per_root:
                visited = set()
            walk(node.name, ())
    unique = []
    for seq in all_seqs:
        if seq not in unique:
            unique.append(seq)
    return unique


def obstructed(model: Model, name: str) -> bool:
    """resolved -> False; or -> any child; and -> all children; leaf -> True."""
    o = next(o for o in model.obstacles if o.name == name)
    if o.resolved_by:
        return False
    if o.or_children:
        return any(obstructed(model, c) for c in o.or_children)
    if o.and_children:
        return all(obstructed(model, c) for c in o.and_children)
    return True


def taint_facts(model: Model, flows: tuple[DataFlow, ...]) -> set[tuple]:
    """Set of (kind, process, flow, subject, witness) tuples raised by ``flows``.

    Evaluated as a set comprehension over the model relations.
    """
    elevated = {Value.Medium, Value.High}
    node = {n.name: n for n in model.nodes}
    task = {t.name: t for t in model.tasks}
    persona = {p.name: p for p in model.personas}
    usecase = {u.name: u for u in model.use_cases}
    obstacle = {o.name: o for o in model.obstacles}
    facts = set()
    for df in flows:
        if (df.from_type is NodeKind.entity and df.to_type is NodeKind.process
                and node[df.from_name].role is not None):
            for tname in usecase[df.to_name].tasks:
                t = task[tname]
                if not (set(df.assets) & set(t.assets)):
                    continue
                demanding = any(p.demand in elevated or p.goal_conflict in elevated
                                for p in t.participants)
                for a in model.attackers:
                    low_time = any(c.value is Value.Low and c.name in ("Time", "Resources/Personnel and Time")
                                   for c in a.capabilities)
                    if not ("Productivity" in a.motivations and low_time and demanding):
                        continue
                    for p in t.participants:
                        for r in set(persona[p.persona].roles) & set(a.roles):
                            facts.add(("PreProcess", df.to_name, df.key, tname, (a.name, r)))
        if df.from_type is NodeKind.process:
            for oname in usecase[df.from_name].exceptions:
                o = obstacle[oname]
                if set(o.concerns) & set(df.assets) and obstructed(model, oname):
                    for g in o.obstructs:
                        facts.add(("PostProcess", df.from_name, df.key, g, oname))
    return facts
