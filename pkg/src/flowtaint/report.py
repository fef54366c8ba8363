"""Text, JSON and DOT renderings of models and analysis results."""

from __future__ import annotations

import json
from importlib import resources
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import yaml

from flowtaint.model import Model, NodeKind
from flowtaint.taint import Analysis, FindingKind, TaintFinding, is_obstacle_obstructed
from flowtaint.traversal import FlowSequence
from flowtaint.validation import Violation


@dataclass(frozen=True)
class SequenceRow:
    id: int
    root: str
    labels: tuple[str, ...]
    pre_taint: bool = False
    post_taint: bool = False


@dataclass
class ReportDocument:
    model_name: str
    violations: list[Violation] = field(default_factory=list)
    sequences: list[SequenceRow] = field(default_factory=list)
    findings: list[TaintFinding] = field(default_factory=list)
    with_taint: bool = True


def build_report(
    model: Model,
    violations: Sequence[Violation] = (),
    sequences: Sequence[FlowSequence] | None = None,
    analysis: Analysis | None = None,
) -> ReportDocument:
    """Assemble a report; sequence taint flags are derived from findings."""
    if analysis is None:
        rows = [SequenceRow(i, s.root, s.labels) for i, s in enumerate(sequences or (), start=1)]
        return ReportDocument(model.name, list(violations), rows, [], with_taint=False)
    rows = [
        SequenceRow(i, s.root, s.labels, analysis.pre_tainted(i), analysis.post_tainted(i))
        for i, s in enumerate(analysis.sequences, start=1)
    ]
    return ReportDocument(model.name, list(violations), rows, list(analysis.findings))


# -- text ---------------------------------------------------------------------

def _describe_witnesses(f: TaintFinding) -> str:
    return "; ".join(f"{k}: {v}" for k, v in f.witnesses)


def render_text(report: ReportDocument, color: bool = False) -> str:
    def paint(text: str, code: str) -> str:
        return f"\x1b[{code}m{text}\x1b[0m" if color else text

    lines = [f"Model: {report.model_name}"]
    if report.violations:
        lines.append(f"Violations ({len(report.violations)}):")
        for v in report.violations:
            lines.append(f"  {paint(v.rule, '31')} {v.subject}: {v.message}")
        return "\n".join(lines) + "\n"

    lines.append("")
    lines.append("Sequences:")
    seq_texts = ["<" + ", ".join(r.labels) + ">" for r in report.sequences]
    width = max([len("Sequence")] + [len(s) for s in seq_texts])
    header = f"  {'Id':>3}  {'Sequence':<{width}}"
    if report.with_taint:
        header += "  Pre   Post"
    lines.append(header.rstrip())
    for row, text in zip(report.sequences, seq_texts):
        line = f"  {row.id:>3}  {text:<{width}}"
        if report.with_taint:
            pre = paint("yes", "31") if row.pre_taint else "no "
            post = paint("yes", "31") if row.post_taint else "no "
            line += f"  {pre}   {post}"
        lines.append(line.rstrip())

    if report.with_taint:
        lines.append("")
        lines.append("Findings:")
        for n, f in enumerate(report.findings, start=1):
            label = "pre-process" if f.kind is FindingKind.PreProcess else "post-process"
            subject = "task" if f.kind is FindingKind.PreProcess else "obstructed goal"
            lines.append(f"  [{n}] {paint(label + ' taint', '31')} on process {f.process}")
            lines.append(f"      flow: {f.flow_label} ({f.flow_from} -> {f.flow_to})")
            lines.append(f"      {subject}: {f.subject}")
            lines.append(f"      because: {_describe_witnesses(f)}")
            lines.append(f"      sequences: {', '.join(str(i) for i in sorted(f.sequence_ids))}")
    lines.append("")
    summary = f"{len(report.sequences)} sequences"
    if report.with_taint:
        summary += f", {len(report.findings)} findings"
    lines.append(summary)
    return "\n".join(lines) + "\n"


# -- structured -----------------------------------------------------------------

def report_to_dict(report: ReportDocument) -> dict:
    return {
        "model": report.model_name,
        "violations": [
            {"subject": v.subject, "rule": v.rule, "message": v.message}
            for v in report.violations
        ],
        "sequences": [
            {
                "id": r.id,
                "root": r.root,
                "flows": list(r.labels),
                "pre_taint": r.pre_taint,
                "post_taint": r.post_taint,
            }
            for r in report.sequences
        ],
        "findings": [
            {
                "kind": f.kind.value,
                "process": f.process,
                "flow": {"label": f.flow_label, "from": f.flow_from, "to": f.flow_to},
                "subject": f.subject,
                "witnesses": dict(f.witnesses),
                "sequence_ids": sorted(f.sequence_ids),
            }
            for f in report.findings
        ],
    }


def load_report_schema() -> dict:
    """JSON schema that :func:`render_structured` output conforms to."""
    path = resources.files("flowtaint") / "data" / "report.schema.json"
    return json.loads(path.read_text(encoding="utf-8"))


def render_structured(report: ReportDocument) -> str:
    return json.dumps(report_to_dict(report), indent=2, ensure_ascii=False) + "\n"


# -- model serialisation ------------------------------------------------------

def model_to_dict(model: Model) -> dict:
    """Model as a document tree that :func:`flowtaint.ingest.load_model` reads back."""
    asset_order = {a.name: i for i, a in reversed(list(enumerate(model.assets)))}

    def ordered(names: Iterable[str]) -> list[str]:
        return sorted(names, key=lambda n: (asset_order.get(n, len(asset_order)), n))

    def asset(a):
        rec = {"name": a.name}
        if a.short_code is not None:
            rec["shortcode"] = a.short_code
        return rec

    def node(n):
        rec = {"name": n.name, "kind": n.kind.value}
        if n.role is not None:
            rec["roleref"] = n.role
        return rec

    return {
        "name": model.name,
        "assets": [asset(a) for a in model.assets],
        "roles": [{"name": r.name} for r in model.roles],
        "personas": [{"name": p.name, "roles": list(p.roles)} for p in model.personas],
        "attackers": [
            {
                "name": a.name,
                "roles": list(a.roles),
                "motivations": list(a.motivations),
                "capabilities": [{"name": c.name, "value": c.value.value} for c in a.capabilities],
            }
            for a in model.attackers
        ],
        "tasks": [
            {
                "name": t.name,
                "participants": [
                    {"persona": p.persona, "demand": p.demand.value, "goalconflict": p.goal_conflict.value}
                    for p in t.participants
                ],
                "assets": ordered(t.assets),
            }
            for t in model.tasks
        ],
        "usecases": [
            {
                "name": uc.name,
                "actors": list(uc.actors),
                "contextualisingtasks": list(uc.tasks),
                "exceptions": list(uc.exceptions),
            }
            for uc in model.use_cases
        ],
        "goals": [{"name": g.name} for g in model.goals],
        "obstacles": [
            {
                "name": o.name,
                "concerns": ordered(o.concerns),
                "obstructs": list(o.obstructs),
                "resolvedby": list(o.resolved_by),
                "orchildren": list(o.or_children),
                "andchildren": list(o.and_children),
            }
            for o in model.obstacles
        ],
        "nodes": [node(n) for n in model.nodes],
        "dataflows": [
            {"label": df.label, "from": df.from_name, "to": df.to_name, "assets": ordered(df.assets)}
            for df in model.data_flows
        ],
        "trustboundaries": [{"name": b.name, "nodes": list(b.nodes)} for b in model.trust_boundaries],
    }


class _Dumper(yaml.SafeDumper):
    pass


def _represent_str(dumper: yaml.SafeDumper, text: str) -> yaml.ScalarNode:
    # Line-break-like characters only survive a reload inside double quotes.
    style = '"' if any(ch in text for ch in "\x85\u2028\u2029") else None
    return dumper.represent_scalar("tag:yaml.org,2002:str", text, style=style)


_Dumper.add_representer(str, _represent_str)


def dump_model(model: Model) -> str:
    """Serialise ``model`` as a YAML model document."""
    return yaml.dump(model_to_dict(model), Dumper=_Dumper, sort_keys=False, allow_unicode=True, width=100)


# -- DOT ------------------------------------------------------------------------

def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _html(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


def _node_attrs(name: str, kind: NodeKind) -> str:
    if kind is NodeKind.entity:
        return "shape=box"
    if kind is NodeKind.process:
        return "shape=ellipse"
    # Data store: open-ended rectangle drawn as two horizontal rules.
    return ('shape=plaintext, label=<<TABLE BORDER="0" CELLBORDER="1" CELLSPACING="0" CELLPADDING="6">'
            f'<TR><TD SIDES="TB">{_html(name)}</TD></TR></TABLE>>')


def export_dfd_dot(model: Model, findings: Sequence[TaintFinding] | None = None) -> str:
    """DOT digraph of the DFD, optionally highlighting tainted flows."""
    tainted: dict[tuple[str, str, str], list[str]] = {}
    for f in findings or ():
        kinds = tainted.setdefault(f.flow_key, [])
        if f.kind.value not in kinds:
            kinds.append(f.kind.value)

    lines = [f"digraph {_q(model.name)} {{", "  rankdir=LR;", '  node [fontname="Helvetica"];',
             '  edge [fontname="Helvetica"];']
    placed: set[str] = set()
    kinds = {n.name: n.kind for n in model.nodes}
    for i, boundary in enumerate(model.trust_boundaries):
        members = [n for n in boundary.nodes if n in kinds and n not in placed]
        lines.append(f"  subgraph {_q(f'cluster_{i}')} {{")
        lines.append(f"    label={_q(boundary.name)};")
        lines.append("    style=dashed;")
        for n in members:
            lines.append(f"    {_q(n)} [{_node_attrs(n, kinds[n])}];")
            placed.add(n)
        lines.append("  }")
    for n in model.nodes:
        if n.name not in placed:
            lines.append(f"  {_q(n.name)} [{_node_attrs(n.name, n.kind)}];")
            placed.add(n.name)
    for df in model.data_flows:
        marks = tainted.get(df.key)
        if marks:
            label = f"{df.label}\n[{', '.join(marks)}]"
            attrs = f"label={_q(label)}, color=red, fontcolor=red, penwidth=2"
        else:
            attrs = f"label={_q(df.label)}"
        lines.append(f"  {_q(df.from_name)} -> {_q(df.to_name)} [{attrs}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_goal_model_dot(model: Model) -> str:
    """DOT digraph of goals and obstacles.

    Refinement edges point from child to refined obstacle: solid for
    and-refinement, dashed for or-refinement. Resolution edges run from
    the resolving goal to the obstacle. Obstructed obstacles are filled red.
    """
    memo: dict[str, bool] = {}
    lines = [f"digraph {_q(model.name + ' goals')} {{", "  rankdir=BT;", '  node [fontname="Helvetica"];',
             '  edge [fontname="Helvetica", fontsize=10];']
    for g in model.goals:
        lines.append(f"  {_q('goal:' + g.name)} [label={_q(g.name)}, shape=parallelogram, "
                     "style=filled, fillcolor=lightblue];")
    for o in model.obstacles:
        obstructed = is_obstacle_obstructed(model, o, memo)
        fill = "red" if obstructed else "white"
        lines.append(f"  {_q('obstacle:' + o.name)} [label={_q(o.name)}, shape=polygon, skew=-0.3, "
                     f"style=filled, fillcolor={fill}, class={'obstructed' if obstructed else 'clear'}];")
    for o in model.obstacles:
        oid = _q("obstacle:" + o.name)
        for child in o.or_children:
            lines.append(f"  {_q('obstacle:' + child)} -> {oid} [label=or, style=dashed];")
        for child in o.and_children:
            lines.append(f"  {_q('obstacle:' + child)} -> {oid} [label=and, style=solid];")
        for goal in o.obstructs:
            lines.append(f"  {oid} -> {_q('goal:' + goal)} [label=obstructs, style=dotted, color=red];")
        for goal in o.resolved_by:
            lines.append(f"  {_q('goal:' + goal)} -> {oid} [label=resolves, style=bold, arrowhead=tee, color=darkgreen];")
    lines.append("}")
    return "\n".join(lines) + "\n"
