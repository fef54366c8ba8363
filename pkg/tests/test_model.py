from __future__ import annotations

import itertools
from collections import Counter

import pytest

from flowtaint.model import (
    Capability,
    Attacker,
    ModelLookupError,
    NodeKind,
    Value,
    node_flows,
    process_for_name,
)

from tests.conftest import entity, flow, graph_model, process, store


def test_value_order_is_total_and_antisymmetric():
    assert list(Value) == [Value.Low, Value.Medium, Value.High]
    assert Value.Low < Value.Medium < Value.High
    for a, b in itertools.product(Value, repeat=2):
        assert (a < b) + (a == b) + (a > b) == 1
        if a <= b and b <= a:
            assert a is b


def test_node_kind_members():
    assert {k.value for k in NodeKind} == {"entity", "process", "datastore"}


def test_node_flows_of_pilot_process(pilot):
    labels = [df.label for df in node_flows(pilot, pilot.node("Modify Telemetry Software"))]
    assert labels == ["alarm", "update", "updated software", "software"]
    assert all(df.from_name == "Modify Telemetry Software" for df in node_flows(pilot, "Modify Telemetry Software"))


def test_node_flows_of_sink_is_empty(pilot):
    assert node_flows(pilot, pilot.node("Change Log")) == []


def test_node_flows_singleton():
    e, p = entity("E"), process("P")
    f = flow("f", e, p)
    assert node_flows(graph_model([e, p], []), e) == []
    assert node_flows(graph_model([e, p], [f]), e) == [f]


def test_every_flow_is_listed_under_its_source(pilot):
    for df in pilot.data_flows:
        assert df in node_flows(pilot, pilot.node(df.from_name))
    concatenated = [df for n in pilot.nodes for df in node_flows(pilot, n)]
    assert Counter(concatenated) == Counter(pilot.data_flows)


def test_process_for_name(pilot):
    assert process_for_name(pilot, "Modify Telemetry Software").name == "Modify Telemetry Software"


@pytest.mark.parametrize("name", ["Technician", "Sandbox", "No Such Process"])
def test_process_for_name_rejects_non_processes(pilot, name):
    with pytest.raises(ModelLookupError):
        process_for_name(pilot, name)


def test_process_for_name_without_use_case():
    m = graph_model([process("P")], [])
    with pytest.raises(ModelLookupError):
        process_for_name(m, "P")


def test_human_entity_needs_role_binding():
    assert entity("E", "Operator").is_human
    assert not entity("E").is_human
    assert not store("S").is_human


@pytest.mark.parametrize(
    "caps,expected",
    [
        ([Capability("Time", Value.Low)], True),
        ([Capability("Resources/Personnel and Time", Value.Low)], True),
        ([Capability("Time", Value.Medium)], False),
        ([Capability("Resources/Personnel", Value.Low)], False),
        ([], False),
    ],
)
def test_low_time_capability(caps, expected):
    assert Attacker("a", capabilities=tuple(caps)).has_low_time is expected


def test_model_is_immutable(pilot):
    with pytest.raises(AttributeError):
        pilot.nodes = ()
