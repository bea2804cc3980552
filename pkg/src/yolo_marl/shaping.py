"""Alignment-based reward shaping.

Each agent whose executed action belongs to the admissible set of its
assignment earns the bonus, otherwise the penalty; the training reward is
the environment reward plus the summed per-agent deltas:

    R = r + sum_i delta_i,   delta_i = bonus if aligned else penalty.

Only training consumes R; evaluation always sums raw environment rewards.
"""

from __future__ import annotations

from dataclasses import dataclass

from .envs.core import EnvSpec
from .errors import ConfigError, ContractViolationError
from .interp import InterpretedState
from .planning.admissible import admissible_actions


@dataclass(frozen=True)
class ShapingConfig:
    reward_bonus: float = 0.05    # r' > 0, added per aligned agent
    penalty: float = -0.05        # p' <= 0, added per misaligned agent
    enabled: bool = True

    def validate(self) -> None:
        if not self.reward_bonus > 0:
            raise ConfigError("reward_bonus must be > 0", field="shaping.reward_bonus")
        if not self.penalty <= 0:
            raise ConfigError("penalty must be <= 0", field="shaping.penalty")


@dataclass(frozen=True)
class ShapedStep:
    env_reward: float
    deltas: tuple[float, ...]
    total: float
    aligned: tuple[bool, ...]


def shape(r: float, actions, assignments, state: InterpretedState, spec: EnvSpec,
          cfg: ShapingConfig) -> ShapedStep:
    """Score one joint step. ``total - env_reward == sum(deltas)`` exactly."""
    if len(actions) != spec.n_agents or len(assignments) != spec.n_agents:
        raise ContractViolationError(
            f"expected {spec.n_agents} actions and assignments, "
            f"got {len(actions)} and {len(assignments)}")
    if not cfg.enabled:
        zeros = (0.0,) * spec.n_agents
        return ShapedStep(env_reward=r, deltas=zeros, total=r,
                          aligned=(False,) * spec.n_agents)
    aligned = tuple(
        actions[i] in admissible_actions(state, i, assignments[i], spec)
        for i in range(spec.n_agents))
    deltas = tuple(cfg.reward_bonus if ok else cfg.penalty for ok in aligned)
    return ShapedStep(env_reward=r, deltas=deltas, total=r + sum(deltas), aligned=aligned)
