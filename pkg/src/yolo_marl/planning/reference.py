"""Built-in planning functions mapping interpreted states to assignments.

Both are total and deterministic; ties break toward the lowest index.
"""

from __future__ import annotations

from ..envs.core import EnvId, EnvSpec
from ..interp import InterpretedState


def _plan_lbf(state: InterpretedState) -> list[str]:
    n_agents = len(state.agents)
    active = [t for t in state.targets if t.active]
    if not active:
        return ["None"] * n_agents

    # Joint target: the active food with the smallest summed Manhattan distance.
    best, best_cost = None, None
    for t in active:
        cost = sum(state.relative[i][t.id].distance for i in range(n_agents))
        if best_cost is None or cost < best_cost:
            best, best_cost = t, cost

    if all(state.relative[i][best.id].distance == 1 for i in range(n_agents)):
        return ["Load"] * n_agents
    return [f"Food{best.id}"] * n_agents


def _plan_mpe(state: InterpretedState) -> list[str]:
    # Greedy closest-pair matching; adequate for n <= 4 and fully deterministic.
    n = len(state.agents)
    free_agents = list(range(n))
    free_marks = list(range(len(state.targets)))
    out = [""] * n
    while free_agents:
        best = None  # (distance, agent, landmark)
        for i in free_agents:
            for j in free_marks:
                d = state.relative[i][j].distance
                if best is None or d < best[0]:
                    best = (d, i, j)
        _, i, j = best
        out[i] = f"Landmark{j}"
        free_agents.remove(i)
        free_marks.remove(j)
    return out


def plan_reference(state: InterpretedState, spec: EnvSpec) -> list[str]:
    """Assign one high-level task per agent. Total over all valid states."""
    if spec.env_id is EnvId.LBF:
        return _plan_lbf(state)
    return _plan_mpe(state)
