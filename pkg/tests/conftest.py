from __future__ import annotations

from pathlib import Path

import pytest

from flowtaint import load_model_file, pilot_model_path
from flowtaint.model import DataFlow, Model, Node, NodeKind

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture(scope="session")
def pilot() -> Model:
    return load_model_file(pilot_model_path())


@pytest.fixture(scope="session")
def pilot_text() -> str:
    return pilot_model_path().read_text(encoding="utf-8")


def corpus_files() -> list[Path]:
    return sorted(CORPUS.glob("*.yaml"))


def flow(label: str, src: Node, dst: Node, *assets: str) -> DataFlow:
    return DataFlow(label, src.name, dst.name, src.kind, dst.kind, frozenset(assets or ("x",)))


def graph_model(nodes: list[Node], flows: list[DataFlow]) -> Model:
    """Bare DFD without usability or requirements context."""
    return Model(name="graph", nodes=tuple(nodes), data_flows=tuple(flows))


def entity(name: str, role: str | None = None) -> Node:
    return Node(name, NodeKind.entity, role)


def process(name: str) -> Node:
    return Node(name, NodeKind.process)


def store(name: str) -> Node:
    return Node(name, NodeKind.datastore)
