"""Semantic interpretation of flat global state vectors.

``interpret`` projects a state vector onto agents, targets (foods or
landmarks) and a per-agent-per-target relative matrix of offsets and
distances: Manhattan on the grid, Euclidean in the particle world. The
result also has a canonical JSON form (stable key order) that doubles as
the payload of the external planner protocol and as prompt material.
"""

from __future__ import annotations

import inspect
import json
from dataclasses import dataclass

import numpy as np

from .envs.core import EnvId, EnvSpec
from .errors import InterpretationError


@dataclass(slots=True)
class AgentView:
    id: int
    position: tuple
    level: int | None = None
    velocity: tuple | None = None


@dataclass(slots=True)
class TargetView:
    id: int
    kind: str  # "food" | "landmark"
    position: tuple
    active: bool
    level: int | None = None


@dataclass(slots=True)
class RelativeEntry:
    offset: tuple  # target position minus agent position
    distance: float


@dataclass(slots=True)
class InterpretedState:
    env_id: EnvId
    agents: list[AgentView]
    targets: list[TargetView]
    relative: list[list[RelativeEntry]]


def _check_length(state, spec: EnvSpec) -> None:
    if len(state) != spec.state_dim:
        raise InterpretationError(
            f"state vector has length {len(state)}, but {spec.env_id.value} "
            f"with {spec.n_agents} agents expects {spec.state_dim}")


def interpret_lbf(state, spec):
    """Grid interpretation: integer cells, Manhattan distances.

    Layout: one (row, col, level) triple per agent, then one per food.
    A food whose level slot is 0 has been collected and is inactive.
    """
    agents = []
    for i in range(spec.n_agents):
        k = 3 * i
        agents.append(AgentView(id=i, position=(int(state[k]), int(state[k + 1])),
                                level=int(state[k + 2])))
    targets = []
    base = 3 * spec.n_agents
    for j in range(spec.n_targets):
        k = base + 3 * j
        level = int(state[k + 2])
        targets.append(TargetView(id=j, kind="food", position=(int(state[k]), int(state[k + 1])),
                                  active=level > 0, level=level))
    relative = []
    for a in agents:
        ar, ac = a.position
        row = []
        for t in targets:
            dr = t.position[0] - ar
            dc = t.position[1] - ac
            row.append(RelativeEntry(offset=(dr, dc), distance=abs(dr) + abs(dc)))
        relative.append(row)
    return InterpretedState(env_id=EnvId.LBF, agents=agents, targets=targets, relative=relative)


def interpret_mpe(state, spec):
    """Particle interpretation: float positions/velocities, Euclidean distances.

    Layout: one (x, y, vx, vy) quadruple per agent, then one (x, y) pair
    per landmark. Landmarks never deactivate.
    """
    agents = []
    for i in range(spec.n_agents):
        k = 4 * i
        agents.append(AgentView(id=i, position=(float(state[k]), float(state[k + 1])),
                                velocity=(float(state[k + 2]), float(state[k + 3]))))
    targets = []
    base = 4 * spec.n_agents
    for j in range(spec.n_targets):
        k = base + 2 * j
        targets.append(TargetView(id=j, kind="landmark",
                                  position=(float(state[k]), float(state[k + 1])), active=True))
    relative = []
    for a in agents:
        ax, ay = a.position
        row = []
        for t in targets:
            dx = t.position[0] - ax
            dy = t.position[1] - ay
            row.append(RelativeEntry(offset=(dx, dy), distance=(dx * dx + dy * dy) ** 0.5))
        relative.append(row)
    return InterpretedState(env_id=EnvId.MPE_SPREAD, agents=agents, targets=targets,
                            relative=relative)


def interpret(state, spec: EnvSpec) -> InterpretedState:
    """Total projection of a valid state vector; pure, no mutation."""
    _check_length(state, spec)
    if not np.all(np.isfinite(np.asarray(state, dtype=np.float64))):
        raise InterpretationError("state vector contains non-finite values")
    if spec.env_id is EnvId.LBF:
        return interpret_lbf(state, spec)
    return interpret_mpe(state, spec)


# -- canonical serialization -------------------------------------------------

def to_payload(s: InterpretedState) -> dict:
    """Plain-dict form with a fixed field set, for JSON transport."""
    agents = []
    for a in s.agents:
        entry = {"id": a.id, "position": list(a.position)}
        if a.level is not None:
            entry["level"] = a.level
        if a.velocity is not None:
            entry["velocity"] = list(a.velocity)
        agents.append(entry)
    targets = []
    for t in s.targets:
        entry = {"id": t.id, "kind": t.kind, "position": list(t.position), "active": t.active}
        if t.level is not None:
            entry["level"] = t.level
        targets.append(entry)
    relative = [[{"offset": list(r.offset), "distance": r.distance} for r in row]
                for row in s.relative]
    return {"env": s.env_id.value, "agents": agents, "targets": targets, "relative": relative}


def canonical_json(s: InterpretedState) -> str:
    """Byte-stable serialization: sorted keys, no whitespace."""
    return json.dumps(to_payload(s), sort_keys=True, separators=(",", ":"))


# -- prompt-facing description -----------------------------------------------

def interpretation_source(spec: EnvSpec) -> str:
    """Human-readable definition of the interpretation function for prompts.

    Contains the state layout table and the exact Python source of the
    interpreter the trainer runs; identical inputs yield identical text.
    """
    from .envs.layouts import layout_table

    if spec.env_id is EnvId.LBF:
        fn = interpret_lbf
    elif spec.env_id is EnvId.MPE_SPREAD:
        fn = interpret_mpe
    else:  # pragma: no cover - EnvId is closed
        raise InterpretationError(f"unknown environment id {spec.env_id!r}")
    parts = [
        f"State vector layout for `{spec.env_id.value}` "
        f"({spec.n_agents} agents, {spec.n_targets} targets):",
        "",
        layout_table(spec),
        "",
        "The state vector is converted to a structured record by this function:",
        "",
        "```python",
        inspect.getsource(fn).rstrip(),
        "```",
        "",
        "Records are serialized as JSON objects with keys",
        '`env`, `agents` (id/position/level/velocity), `targets`',
        '(id/kind/position/active/level) and `relative`, a per-agent list of',
        'per-target `{"offset": [...], "distance": ...}` entries.',
    ]
    return "\n".join(parts)
