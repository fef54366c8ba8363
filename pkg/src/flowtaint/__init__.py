"""Design-level taint analysis for data flow diagrams in context."""

from importlib import resources
from pathlib import Path

from flowtaint.ingest import ModelParseError, ParseIssue, load_model, load_model_file
from flowtaint.model import Model, node_flows, process_for_name
from flowtaint.taint import (
    Analysis,
    FindingKind,
    TaintFinding,
    analyse_data_flows,
    analyse_model,
    is_obstacle_obstructed,
)
from flowtaint.traversal import FlowSequence, VisitedScope, enumerate_sequences
from flowtaint.validation import Violation, check_data_flow, check_model

__all__ = [
    "Analysis",
    "FindingKind",
    "FlowSequence",
    "Model",
    "ModelParseError",
    "ParseIssue",
    "TaintFinding",
    "Violation",
    "VisitedScope",
    "analyse_data_flows",
    "analyse_model",
    "check_data_flow",
    "check_model",
    "enumerate_sequences",
    "is_obstacle_obstructed",
    "load_model",
    "load_model_file",
    "node_flows",
    "pilot_model_path",
    "process_for_name",
]


def pilot_model_path() -> Path:
    """Path of the bundled pilot study model."""
    return Path(str(resources.files("flowtaint") / "data" / "pilot.yaml"))
