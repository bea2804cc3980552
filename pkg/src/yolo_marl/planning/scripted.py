"""Deterministic policy that executes reference-planner assignments directly.

Used as a perfect-play oracle for LBF evaluation and in demos. Unlike the
admissible-action relation (which only describes alignment), this policy
also routes around occupied cells so two agents cannot livelock while
approaching the same food.
"""

from __future__ import annotations

from ..envs.core import (A_EAST, A_LOAD, A_NONE, A_NORTH, A_SOUTH, A_WEST,
                         EnvId, EnvSpec, LBF_MOVES)
from ..interp import interpret
from .reference import plan_reference


class ScriptedLbfPolicy:
    """Greedy follow-the-planner controller for the foraging grid."""

    def __init__(self, spec: EnvSpec, grid_size: int = 8):
        if spec.env_id is not EnvId.LBF:
            raise ValueError("ScriptedLbfPolicy only drives the lbf environment")
        self.spec = spec
        self.grid_size = grid_size

    def act(self, state) -> list[int]:
        s = interpret(state, self.spec)
        assignments = plan_reference(s, self.spec)
        blocked = {a.position for a in s.agents}
        blocked.update(t.position for t in s.targets if t.active)

        actions = []
        for i, label in enumerate(assignments):
            if label == "Load":
                actions.append(A_LOAD)
                continue
            if label == "None":
                actions.append(A_NONE)
                continue
            food = s.targets[int(label[len("Food"):])]
            if not food.active:
                actions.append(A_NONE)
                continue
            dr, dc = s.relative[i][food.id].offset
            if abs(dr) + abs(dc) == 1:
                actions.append(A_LOAD)
                continue
            actions.append(self._route(s.agents[i].position, (dr, dc), blocked))
        return actions

    def _route(self, pos, offset, blocked) -> int:
        dr, dc = offset
        prefer = []
        # Larger remaining axis first, then the other decreasing axis.
        first_vertical = abs(dr) >= abs(dc)
        vertical = A_NORTH if dr < 0 else A_SOUTH if dr > 0 else None
        horizontal = A_WEST if dc < 0 else A_EAST if dc > 0 else None
        order = [vertical, horizontal] if first_vertical else [horizontal, vertical]
        prefer.extend(a for a in order if a is not None)
        # Side steps keep distance constant but break symmetric blockades.
        prefer.extend(a for a in (A_NORTH, A_SOUTH, A_WEST, A_EAST) if a not in prefer)
        for a in prefer:
            mr, mc = LBF_MOVES[a]
            cell = (pos[0] + mr, pos[1] + mc)
            if not (0 <= cell[0] < self.grid_size and 0 <= cell[1] < self.grid_size):
                continue
            if cell in blocked:
                continue
            return a
        return A_NONE
