"""Seeded generator for large, valid models used in stress tests."""

from __future__ import annotations

import random
from dataclasses import dataclass

from flowtaint.model import (
    PERMITTED_FLOW_PAIRS,
    PRODUCTIVITY,
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
    UseCase,
    Value,
)


@dataclass(frozen=True)
class Scale:
    attackers: int = 10
    roles: int = 14
    personas: int = 9
    tasks: int = 12
    use_cases: int = 29
    goals: int = 46
    obstacles: int = 25
    assets: int = 82
    data_flows: int = 134
    entities: int = 12
    datastores: int = 8


# Element counts of the larger evaluation model (military medical system).
LARGE_MODEL = Scale()


def _sample(rng: random.Random, items: list, lo: int, hi: int) -> list:
    k = min(len(items), rng.randint(lo, hi))
    return rng.sample(items, k)


def synthetic_model(scale: Scale = LARGE_MODEL, seed: int = 0) -> Model:
    """Build a random model that passes validation at the given scale."""
    rng = random.Random(seed)
    values = list(Value)

    assets = [Asset(f"asset {i:03d}") for i in range(scale.assets)]
    asset_names = [a.name for a in assets]
    roles = [Role(f"role {i:02d}") for i in range(scale.roles)]
    role_names = [r.name for r in roles]
    personas = [Persona(f"persona {i:02d}", tuple(_sample(rng, role_names, 1, 2)))
                for i in range(scale.personas)]
    persona_names = [p.name for p in personas]

    attackers = []
    for i in range(scale.attackers):
        motives = [PRODUCTIVITY] if rng.random() < 0.6 else []
        motives += _sample(rng, ["Money", "Thrill", "Esteem", "Ideology"], 0, 2)
        caps = [Capability(name, rng.choice(values))
                for name in _sample(rng, ["Time", "Resources/Personnel and Time", "Knowledge/Methods", "Software"], 1, 3)]
        attackers.append(Attacker(f"attacker {i:02d}", tuple(_sample(rng, role_names, 1, 2)),
                                  tuple(motives), tuple(caps)))

    tasks = []
    for i in range(scale.tasks):
        participants = tuple(Participant(p, rng.choice(values), rng.choice(values))
                             for p in _sample(rng, persona_names, 1, 3))
        tasks.append(Task(f"task {i:02d}", participants, frozenset(_sample(rng, asset_names, 1, 8))))
    task_names = [t.name for t in tasks]

    goals = [Goal(f"goal {i:02d}") for i in range(scale.goals)]
    goal_names = [g.name for g in goals]

    # Children always have a higher index than their parent: acyclic.
    obstacle_names = [f"obstacle {i:02d}" for i in range(scale.obstacles)]
    obstacles = []
    for i, name in enumerate(obstacle_names):
        later = obstacle_names[i + 1:]
        children = _sample(rng, later, 0, 3) if later and rng.random() < 0.4 else []
        is_or = rng.random() < 0.5
        obstacles.append(Obstacle(
            name,
            concerns=frozenset(_sample(rng, asset_names, 1, 4)),
            obstructs=tuple(_sample(rng, goal_names, 1, 2)),
            resolved_by=tuple(_sample(rng, goal_names, 1, 1)) if rng.random() < 0.4 else (),
            or_children=tuple(children) if is_or else (),
            and_children=() if is_or else tuple(children),
        ))

    processes = [f"process {i:02d}" for i in range(scale.use_cases)]
    use_cases = [
        UseCase(
            name,
            actors=tuple(_sample(rng, role_names, 0, 2)),
            tasks=tuple(_sample(rng, task_names, 0, 2)),
            exceptions=tuple(_sample(rng, obstacle_names, 0, 2)),
        )
        for name in processes
    ]

    nodes = [Node(f"entity {i:02d}", NodeKind.entity, rng.choice(role_names) if rng.random() < 0.6 else None)
             for i in range(scale.entities)]
    nodes += [Node(name, NodeKind.process) for name in processes]
    nodes += [Node(f"store {i:02d}", NodeKind.datastore) for i in range(scale.datastores)]

    flows: list[DataFlow] = []
    seen = set()
    while len(flows) < scale.data_flows:
        src, dst = rng.sample(nodes, 2)
        if (src.kind, dst.kind) not in PERMITTED_FLOW_PAIRS or (src.name, dst.name) in seen:
            continue
        seen.add((src.name, dst.name))
        flows.append(DataFlow(f"flow {len(flows):03d}", src.name, dst.name, src.kind, dst.kind,
                              frozenset(_sample(rng, asset_names, 1, 3))))

    return Model(
        name=f"synthetic-{seed}",
        assets=tuple(assets),
        roles=tuple(roles),
        personas=tuple(personas),
        attackers=tuple(attackers),
        tasks=tuple(tasks),
        use_cases=tuple(use_cases),
        goals=tuple(goals),
        obstacles=tuple(obstacles),
        nodes=tuple(nodes),
        data_flows=tuple(flows),
    )
