"""Pre-process and post-process taint checks over flow sequences.

Pre-process taint marks a flow from a human entity into a process when a
task the process puts in context gives a productivity-driven, time-poor
attacker the chance to err: the attacker shares a role with a persona in
the task, and the task is demanding or conflicts with the persona's goals.

Post-process taint marks a flow leaving a process when one of the process'
exceptions is an obstacle that concerns an asset on the flow and remains
obstructed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from flowtaint.model import (
    DataFlow,
    Model,
    ModelLookupError,
    NodeKind,
    Obstacle,
    Value,
    process_for_name,
)
from flowtaint.traversal import FlowSequence, VisitedScope, enumerate_sequences

ELEVATED = frozenset({Value.Medium, Value.High})


class FindingKind(enum.Enum):
    PreProcess = "PreProcess"
    PostProcess = "PostProcess"


_KIND_ORDER = {FindingKind.PreProcess: 0, FindingKind.PostProcess: 1}


@dataclass(frozen=True)
class TaintFinding:
    """One taint report.

    ``subject`` is a task for pre-process findings and an obstructed goal
    for post-process ones. ``witnesses`` names the elements that explain
    the finding. ``sequence_ids`` are 1-based positions in the sequence
    list the finding was raised from.
    """

    kind: FindingKind
    process: str
    flow_label: str
    flow_from: str
    flow_to: str
    subject: str
    witnesses: tuple[tuple[str, str], ...]
    sequence_ids: frozenset[int] = frozenset()

    @property
    def identity(self) -> tuple:
        return (self.kind, self.process, self.flow_label, self.flow_from,
                self.flow_to, self.subject, self.witnesses)

    @property
    def flow_key(self) -> tuple[str, str, str]:
        return (self.flow_label, self.flow_from, self.flow_to)

    def witness(self, role: str) -> str | None:
        return dict(self.witnesses).get(role)


def is_obstacle_obstructed(
    model: Model, obstacle: Obstacle | str, _memo: dict[str, bool] | None = None
) -> bool:
    """Whether ``obstacle`` still obstructs its goals.

    A resolved obstacle is never obstructed. Otherwise an or-refined
    obstacle is obstructed when any child is, an and-refined one only when
    every child is, and an unrefined one always is. Assumes an acyclic
    refinement graph; with both kinds of children present the and-children
    decide, as in the original loop ordering.
    """
    o = model.obstacle(obstacle) if isinstance(obstacle, str) else obstacle
    memo = {} if _memo is None else _memo
    if o.name in memo:
        return memo[o.name]

    if o.resolved_by:
        obstructed = False
    else:
        obstructed = True
        for child in o.or_children:
            obstructed = is_obstacle_obstructed(model, child, memo)
            if obstructed:
                break
        for child in o.and_children:
            obstructed = is_obstacle_obstructed(model, child, memo)
            if not obstructed:
                break
    memo[o.name] = obstructed
    return obstructed


def _pre_process(model: Model, df: DataFlow) -> Iterable[TaintFinding]:
    source = model.node_index.get(df.from_name)
    if not (df.from_type is NodeKind.entity and df.to_type is NodeKind.process
            and source is not None and source.is_human):
        return
    use_case = process_for_name(model, df.to_name)
    attacker_roles = model.attacker_roles
    for task_name in use_case.tasks:
        task = model.task_index[task_name]
        if not df.assets & task.assets:
            continue
        shared: dict[str, str] = {}
        for persona_name in task.personas:
            for role in model.persona_index[persona_name].roles:
                if role in attacker_roles:
                    shared.setdefault(role, persona_name)
        for role, persona_name in shared.items():
            for attacker in model.attackers_for_role(role):
                if (attacker.is_productivity_driven
                        and attacker.has_low_time
                        and (task.demands & ELEVATED or task.goal_conflicts & ELEVATED)):
                    yield TaintFinding(
                        FindingKind.PreProcess, use_case.name, df.label, df.from_name,
                        df.to_name, task.name,
                        (("attacker", attacker.name), ("persona", persona_name), ("role", role)),
                    )


def _post_process(model: Model, df: DataFlow, memo: dict[str, bool]) -> Iterable[TaintFinding]:
    if df.from_type is not NodeKind.process:
        return
    use_case = process_for_name(model, df.from_name)
    for obstacle_name in use_case.exceptions:
        obstacle = model.obstacle(obstacle_name)
        if not obstacle.concerns & df.assets:
            continue
        for goal in obstacle.obstructs:
            if is_obstacle_obstructed(model, obstacle, memo):
                yield TaintFinding(
                    FindingKind.PostProcess, use_case.name, df.label, df.from_name,
                    df.to_name, goal, (("obstacle", obstacle.name),),
                )


def analyse_data_flows(
    model: Model, sequence: FlowSequence | Sequence[DataFlow], log: list | None = None,
    _memo: dict[str, bool] | None = None,
) -> list[TaintFinding]:
    """Check every flow of one sequence for pre- and post-process taint.

    Findings are returned in the order they are raised and also appended
    to ``log`` when one is given.
    """
    flows = sequence.flows if isinstance(sequence, FlowSequence) else tuple(sequence)
    memo = {} if _memo is None else _memo
    out: list[TaintFinding] = []
    for df in flows:
        out.extend(_pre_process(model, df))
        out.extend(_post_process(model, df, memo))
    if log is not None:
        log.extend(out)
    return out


@dataclass
class Analysis:
    sequences: list[FlowSequence]
    findings: list[TaintFinding] = field(default_factory=list)

    def pre_tainted(self, seq_id: int) -> bool:
        return any(f.kind is FindingKind.PreProcess and seq_id in f.sequence_ids for f in self.findings)

    def post_tainted(self, seq_id: int) -> bool:
        return any(f.kind is FindingKind.PostProcess and seq_id in f.sequence_ids for f in self.findings)


def merge_findings(per_sequence: Sequence[Sequence[tuple[int, TaintFinding]]]) -> list[TaintFinding]:
    """Merge findings raised from several sequences.

    ``per_sequence[i]`` holds (flow position, finding) pairs for sequence
    id ``i + 1``. Identical findings are merged, accumulating sequence
    ids; the result is ordered by first sequence id, flow position within
    that sequence, then kind.
    """
    merged: dict[tuple, list] = {}
    for seq_index, raised in enumerate(per_sequence):
        seq_id = seq_index + 1
        for pos, finding in raised:
            entry = merged.get(finding.identity)
            if entry is None:
                merged[finding.identity] = [seq_id, pos, finding, {seq_id}]
            else:
                entry[3].add(seq_id)
    ordered = sorted(merged.values(), key=lambda e: (e[0], e[1], _KIND_ORDER[e[2].kind]))
    return [
        TaintFinding(**{**f.__dict__, "sequence_ids": frozenset(ids)})
        for _, _, f, ids in ordered
    ]


def analyse_model(model: Model, scope: VisitedScope | str = VisitedScope.GLOBAL) -> Analysis:
    """Enumerate sequences and run the taint checks over each one.

    The model must pass :func:`flowtaint.validation.check_model`.
    """
    sequences = enumerate_sequences(model, scope)
    memo: dict[str, bool] = {}
    per_sequence = []
    for seq in sequences:
        raised = []
        for pos, df in enumerate(seq.flows):
            try:
                found = analyse_data_flows(model, (df,), _memo=memo)
            except (KeyError, ModelLookupError) as exc:
                raise ModelLookupError(f"model is not valid for analysis: {exc}") from exc
            raised.extend((pos, f) for f in found)
        per_sequence.append(raised)
    return Analysis(sequences, merge_findings(per_sequence))
