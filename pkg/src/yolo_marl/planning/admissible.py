"""Assignment-to-action relation.

An assignment admits the set of low-level actions that make progress on it;
the relation is many-to-many (a diagonal target admits two moves, and one
move can serve several assignments). Alignment of an executed action with
its assignment is membership in this set.
"""

from __future__ import annotations

from ..envs.core import (A_EAST, A_LOAD, A_NONE, A_NORTH, A_SOUTH, A_WEST,
                         EnvId, EnvSpec, M_DOWN, M_LEFT, M_NOOP, M_RIGHT, M_UP)
from ..errors import ContractViolationError
from ..interp import InterpretedState

# Axis progress below this many world units does not count (prevents
# oscillation around a landmark from being labeled aligned).
MPE_DEAD_BAND = 0.05

_FS_NONE = frozenset({A_NONE})
_FS_LOAD = frozenset({A_LOAD})
_FS_LOAD_OR_WAIT = frozenset({A_LOAD, A_NONE})
_FS_NOOP = frozenset({M_NOOP})


def _parse_target(label: str, prefix: str, n: int) -> int | None:
    if label.startswith(prefix):
        try:
            idx = int(label[len(prefix):])
        except ValueError:
            return None
        if 0 <= idx < n:
            return idx
    return None


def _admissible_lbf(state, agent, label, spec):
    if label == "None":
        return _FS_NONE
    if label == "Load":
        return _FS_LOAD
    idx = _parse_target(label, "Food", spec.n_targets)
    if idx is None:
        raise ContractViolationError(f"assignment {label!r} not in {spec.assignment_set}")
    target = state.targets[idx]
    if not target.active:
        # Degenerate target: collected food admits only waiting.
        return _FS_NONE
    dr, dc = state.relative[agent][idx].offset
    if abs(dr) + abs(dc) <= 1:
        # Travel goal reached: load, or wait for the partner.
        return _FS_LOAD_OR_WAIT
    moves = set()
    if dr < 0:
        moves.add(A_NORTH)
    elif dr > 0:
        moves.add(A_SOUTH)
    if dc < 0:
        moves.add(A_WEST)
    elif dc > 0:
        moves.add(A_EAST)
    return frozenset(moves)


def _admissible_mpe(state, agent, label, spec):
    if label == "NoAction":
        return _FS_NOOP
    idx = _parse_target(label, "Landmark", spec.n_targets)
    if idx is None:
        raise ContractViolationError(f"assignment {label!r} not in {spec.assignment_set}")
    dx, dy = state.relative[agent][idx].offset
    moves = set()
    if dx > MPE_DEAD_BAND:
        moves.add(M_RIGHT)
    elif dx < -MPE_DEAD_BAND:
        moves.add(M_LEFT)
    if dy > MPE_DEAD_BAND:
        moves.add(M_UP)
    elif dy < -MPE_DEAD_BAND:
        moves.add(M_DOWN)
    if not moves:
        return _FS_NOOP
    return frozenset(moves)


def admissible_actions(state: InterpretedState, agent: int, assignment: str,
                       spec: EnvSpec) -> frozenset[int]:
    """Action indices admissible for ``agent`` under ``assignment``. Never empty."""
    if not 0 <= agent < spec.n_agents:
        raise ContractViolationError(f"agent index {agent} outside [0, {spec.n_agents})")
    if spec.env_id is EnvId.LBF:
        return _admissible_lbf(state, agent, assignment, spec)
    return _admissible_mpe(state, agent, assignment, spec)
