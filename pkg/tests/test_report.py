from __future__ import annotations

import json
import random
from dataclasses import replace

import jsonschema
import pydot
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowtaint.ingest import load_model
from flowtaint.model import Goal, Model, Obstacle, TrustBoundary
from flowtaint.report import (
    ReportDocument,
    SequenceRow,
    build_report,
    export_dfd_dot,
    export_goal_model_dot,
    load_report_schema,
    render_structured,
    render_text,
)
from flowtaint.synthetic import synthetic_model
from flowtaint.taint import Analysis, FindingKind, TaintFinding, analyse_model
from flowtaint.traversal import enumerate_sequences
from flowtaint.validation import check_model


def parse_dot(text: str) -> pydot.Dot:
    graphs = pydot.graph_from_dot_data(text)
    assert graphs is not None and len(graphs) == 1
    return graphs[0]


def unquote(s: str) -> str:
    return s[1:-1] if s.startswith('"') else s


def pilot_report(pilot):
    return build_report(pilot, analysis=analyse_model(pilot))


# -- text ---------------------------------------------------------------------

def test_pilot_text(pilot):
    text = render_text(pilot_report(pilot))
    rows = [line for line in text.splitlines() if line.strip()[:1].isdigit() and "<" in line]
    assert len(rows) == 5
    assert rows[0].split()[-2:] == ["yes", "yes"]
    assert all(r.split()[-2] == "yes" for r in rows[:4])
    assert rows[4].split()[-2:] == ["no", "no"]
    assert "Outstation update" in text and "Unintentional Barry" in text
    assert "Change alarm not sent" in text
    assert text.endswith("5 sequences, 2 findings\n")
    assert "\x1b[" not in text


def test_text_colour_is_opt_in(pilot):
    assert "\x1b[31m" in render_text(pilot_report(pilot), color=True)


def test_empty_model_text():
    m = Model(name="empty")
    text = render_text(build_report(m, analysis=analyse_model(m)))
    assert text.startswith("Model: empty\n")
    assert text.endswith("0 sequences, 0 findings\n")


def test_violations_only_text():
    m = load_model("nodes: [{name: P, kind: process}]\n", name="bad")
    text = render_text(build_report(m, check_model(m)))
    assert "Violations (1):" in text and "R_NO_USECASE" in text
    assert "Sequences" not in text and "Findings" not in text


def test_sequences_without_taint_columns(pilot):
    text = render_text(build_report(pilot, sequences=enumerate_sequences(pilot)))
    assert "Pre" not in text and "findings" not in text
    assert text.endswith("5 sequences\n")


# -- structured -------------------------------------------------------------------

def test_pilot_structured(pilot):
    doc = json.loads(render_structured(pilot_report(pilot)))
    jsonschema.validate(doc, load_report_schema())
    assert len(doc["findings"]) == 2
    assert doc["findings"][0]["sequence_ids"] == [1, 2, 3, 4]
    assert [s["flows"] for s in doc["sequences"]][2] == ["job", "updated software", "current software"]
    assert render_structured(pilot_report(pilot)) == render_structured(pilot_report(pilot))


def test_structured_is_newline_terminated_utf8():
    m = Model(name="Café")
    out = render_structured(build_report(m, analysis=analyse_model(m)))
    assert out.endswith("\n") and "Café" in out


def test_violation_report_validates():
    m = load_model("nodes: [{name: P, kind: process}]\n")
    doc = json.loads(render_structured(build_report(m, check_model(m))))
    jsonschema.validate(doc, load_report_schema())
    assert doc["violations"][0]["rule"] == "R_NO_USECASE"


def finding(kind: FindingKind, ids, label="f") -> TaintFinding:
    return TaintFinding(kind, "P", label, "E", "P", "S", (("attacker", "a"),), frozenset(ids))


def test_sequence_ids_sorted():
    f = finding(FindingKind.PreProcess, {9, 2, 5})
    doc = json.loads(render_structured(ReportDocument("m", findings=[f])))
    assert doc["findings"][0]["sequence_ids"] == [2, 5, 9]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.sets(st.integers(1, 6), min_size=1)), max_size=6))
def test_sequence_flags_follow_findings(raw):
    from flowtaint.traversal import FlowSequence
    from tests.conftest import entity, flow, process

    e, p = entity("E"), process("P")
    seqs = [FlowSequence("E", (flow(f"f{i}", e, p),)) for i in range(6)]
    findings = [finding(FindingKind.PreProcess if pre else FindingKind.PostProcess, ids, f"l{i}")
                for i, (pre, ids) in enumerate(raw)]
    report = build_report(Model(), analysis=Analysis(seqs, findings))
    for row in report.sequences:
        assert row.pre_taint == any(f.kind is FindingKind.PreProcess and row.id in f.sequence_ids for f in findings)
        assert row.post_taint == any(f.kind is FindingKind.PostProcess and row.id in f.sequence_ids for f in findings)


@settings(max_examples=100, deadline=None)
@given(
    st.text(max_size=5),
    st.lists(st.tuples(st.text(max_size=4), st.booleans(), st.booleans()), max_size=3),
    st.text(max_size=5),
    st.text(max_size=5),
)
def test_distinct_reports_render_distinctly(name_a, rows, name_b, label):
    a = ReportDocument(name_a, sequences=[SequenceRow(i + 1, r, (r,), p, q) for i, (r, p, q) in enumerate(rows)])
    b = ReportDocument(name_b, sequences=list(a.sequences) + [SequenceRow(len(rows) + 1, label, (label,))])
    assert render_structured(a) != render_structured(b)
    assert (render_structured(a) == render_structured(ReportDocument(name_b, sequences=a.sequences))) == (name_a == name_b)


# -- DOT --------------------------------------------------------------------------

def test_pilot_dfd_dot(pilot):
    findings = analyse_model(pilot).findings
    g = parse_dot(export_dfd_dot(pilot, findings))
    edges = g.get_edges()
    assert len(edges) == 7
    tainted = {unquote(e.get("label")).split("\\n")[0] for e in edges if e.get("color") == "red"}
    assert tainted == {"job", "alarm"}
    labels = [unquote(e.get("label")) for e in edges]
    assert "job\\n[PreProcess]" in labels and "alarm\\n[PostProcess]" in labels


def test_node_shapes(pilot):
    text = export_dfd_dot(pilot)
    g = parse_dot(text)
    nodes = {unquote(n.get_name()): n for n in g.get_nodes()}
    for sub in g.get_subgraphs():
        nodes.update({unquote(n.get_name()): n for n in sub.get_nodes()})
    assert nodes["Technician"].get("shape") == "box"
    assert nodes["Modify Telemetry Software"].get("shape") == "ellipse"
    assert nodes["Sandbox"].get("shape") == "plaintext"
    assert 'SIDES="TB"' in nodes["Sandbox"].get("label")


def test_plain_dfd_has_no_styling(pilot):
    text = export_dfd_dot(pilot)
    parse_dot(text)
    assert "color=red" not in text and "PreProcess" not in text


def test_trust_boundary_cluster(pilot):
    g = parse_dot(export_dfd_dot(pilot))
    (cluster,) = g.get_subgraphs()
    assert cluster.get("style") == "dashed"
    assert {unquote(n.get_name()) for n in cluster.get_nodes()} == {"Telemetry Outstation", "Control Room"}


def test_empty_model_dot():
    text = export_dfd_dot(Model(name="empty"))
    g = parse_dot(text)
    assert g.get_nodes() == [] or all(n.get_name() in ("node", "edge") for n in g.get_nodes())
    assert g.get_edges() == []


def test_awkward_names_are_escaped():
    m = load_model('nodes: [{name: "say \\"hi\\" \\\\ <x>", kind: datastore}, {name: "a&b", kind: entity}]\n')
    parse_dot(export_dfd_dot(m))
    parse_dot(export_goal_model_dot(m))


def goal_classes(model: Model) -> dict[str, str]:
    g = parse_dot(export_goal_model_dot(model))
    return {unquote(n.get("label")): n.get("class") for n in g.get_nodes() if n.get_name().startswith('"obstacle:')}


def test_pilot_goal_model(pilot):
    classes = goal_classes(pilot)
    assert classes["Change alarm not sent"] == "obstructed"
    assert classes["Software change not recorded"] == "clear"
    text = export_goal_model_dot(pilot)
    assert "label=or, style=dashed" in text and "label=and, style=solid" in text
    assert "label=resolves" in text


def test_resolved_leaf_not_styled():
    m = Model(goals=(Goal("G"),), obstacles=(Obstacle("O", obstructs=("G",), resolved_by=("G",)),))
    assert goal_classes(m) == {"O": "clear"}


def test_two_level_and_refinement_all_resolved():
    m = Model(goals=(Goal("G"),), obstacles=(
        Obstacle("Top", and_children=("Mid1", "Mid2")),
        Obstacle("Mid1", and_children=("L1", "L2")),
        Obstacle("Mid2", resolved_by=("G",)),
        Obstacle("L1", resolved_by=("G",)),
        Obstacle("L2", resolved_by=("G",)),
    ))
    from tests.oracles import obstructed

    assert obstructed(m, "Top") is False
    assert goal_classes(m)["Top"] == "clear"


@pytest.mark.parametrize("seed", range(5))
def test_synthetic_dot_parses(seed):
    m = synthetic_model(seed=seed)
    m = replace(m, trust_boundaries=(TrustBoundary("zone", tuple(n.name for n in m.nodes[:5])),))
    findings = analyse_model(m).findings
    g = parse_dot(export_dfd_dot(m, findings))
    assert len(g.get_edges()) == len(m.data_flows)
    parse_dot(export_goal_model_dot(m))
    assert export_dfd_dot(m, findings).endswith("}\n")
