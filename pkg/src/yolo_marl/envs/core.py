"""Shared environment contracts: ids, action sets, specs, state layouts.

The global state is a flat float64 vector. Its layout is described by
``EnvSpec.state_layout``, a tuple of ``LayoutField`` entries mapping named
components to index ranges, and rendered to markdown by
:mod:`yolo_marl.envs.layouts`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import ConfigError, ContractViolationError


class EnvId(str, Enum):
    LBF = "lbf"
    MPE_SPREAD = "mpe_spread"


LBF_ACTIONS = ("NONE", "NORTH", "SOUTH", "WEST", "EAST", "LOAD")
MPE_ACTIONS = ("no_action", "move_left", "move_right", "move_down", "move_up")

# LBF action indices, used across planning and tests.
A_NONE, A_NORTH, A_SOUTH, A_WEST, A_EAST, A_LOAD = range(6)
# MPE action indices.
M_NOOP, M_LEFT, M_RIGHT, M_DOWN, M_UP = range(5)

# (drow, dcol) for LBF movement actions; rows grow southward.
LBF_MOVES = {A_NORTH: (-1, 0), A_SOUTH: (1, 0), A_WEST: (0, -1), A_EAST: (0, 1)}
# (fx, fy) unit force for MPE movement actions.
MPE_FORCES = {M_NOOP: (0.0, 0.0), M_LEFT: (-1.0, 0.0), M_RIGHT: (1.0, 0.0),
              M_DOWN: (0.0, -1.0), M_UP: (0.0, 1.0)}


@dataclass(frozen=True)
class LayoutField:
    name: str
    start: int
    stop: int  # exclusive
    description: str


@dataclass(frozen=True)
class EnvSpec:
    """Static description of one environment instance family."""

    env_id: EnvId
    n_agents: int
    n_targets: int  # foods (LBF) or landmarks (MPE)
    action_set: tuple[str, ...]
    assignment_set: tuple[str, ...]
    episode_limit: int
    state_layout: tuple[LayoutField, ...]

    @property
    def state_dim(self) -> int:
        return self.state_layout[-1].stop

    def validate_action(self, action) -> list[int]:
        """Check a joint action against this spec; returns it as a plain list."""
        try:
            acts = [int(a) for a in action]
        except (TypeError, ValueError) as exc:
            raise ContractViolationError(f"joint action must be a sequence of ints: {action!r}") from exc
        if len(acts) != self.n_agents:
            raise ContractViolationError(
                f"joint action has {len(acts)} entries, expected {self.n_agents}")
        for i, a in enumerate(acts):
            if not 0 <= a < len(self.action_set):
                raise ContractViolationError(
                    f"agent {i}: action index {a} outside [0, {len(self.action_set)})")
        return acts


@dataclass(frozen=True)
class StepResult:
    next_state: np.ndarray
    reward: float
    done: bool
    info: dict = field(default_factory=dict)


@dataclass(frozen=True)
class LbfConfig:
    """Level-based foraging, forced-cooperation gridworld."""

    grid_size: int = 8
    n_agents: int = 2
    n_foods: int = 2
    force_coop: bool = True
    agent_levels: tuple[int, ...] = (1, 1)
    episode_limit: int = 50
    rng_seed: int = 0

    env_id = EnvId.LBF

    def validate(self) -> None:
        if self.grid_size < 3:
            raise ConfigError("grid_size must be >= 3", field="env.grid_size")
        if self.n_agents < 1:
            raise ConfigError("n_agents must be >= 1", field="env.n_agents")
        if len(self.agent_levels) != self.n_agents:
            raise ConfigError(
                f"agent_levels has {len(self.agent_levels)} entries for {self.n_agents} agents",
                field="env.agent_levels")
        if any(lv < 1 for lv in self.agent_levels):
            raise ConfigError("agent levels must be >= 1", field="env.agent_levels")
        if self.episode_limit < 1:
            raise ConfigError("episode_limit must be >= 1", field="env.episode_limit")
        interior = (self.grid_size - 2) ** 2
        if self.n_foods > interior or self.n_foods + self.n_agents >= self.grid_size ** 2:
            raise ConfigError(
                f"{self.n_foods} foods + {self.n_agents} agents do not fit a "
                f"{self.grid_size}x{self.grid_size} grid", field="env.n_foods")

    @property
    def food_level(self) -> int:
        # force_coop: only a simultaneous load by everyone can reach the level.
        return sum(self.agent_levels) if self.force_coop else max(self.agent_levels)

    @property
    def total_food_level(self) -> int:
        return self.food_level * self.n_foods


@dataclass(frozen=True)
class MpeSpreadConfig:
    """Particle landmark-coverage world with discrete movement actions."""

    n_agents: int = 3
    dt: float = 0.1
    damping: float = 0.25
    accel: float = 5.0
    max_speed: float = 1.3
    world_extent: float = 1.0
    collision_radius: float = 0.15
    collision_penalty: float = 1.0
    episode_limit: int = 25
    rng_seed: int = 0

    env_id = EnvId.MPE_SPREAD

    @property
    def n_landmarks(self) -> int:
        return self.n_agents

    def validate(self) -> None:
        if self.n_agents not in (3, 4):
            raise ConfigError("n_agents must be 3 or 4", field="env.n_agents")
        if not 0.0 < self.dt:
            raise ConfigError("dt must be positive", field="env.dt")
        if not 0.0 <= self.damping < 1.0:
            raise ConfigError("damping must lie in [0, 1)", field="env.damping")
        if self.max_speed <= 0 or self.world_extent <= 0 or self.collision_radius <= 0:
            raise ConfigError("max_speed, world_extent and collision_radius must be positive",
                              field="env")
        if self.episode_limit < 1:
            raise ConfigError("episode_limit must be >= 1", field="env.episode_limit")


EnvConfig = LbfConfig | MpeSpreadConfig


def lbf_assignment_set(n_foods: int) -> tuple[str, ...]:
    return ("None",) + tuple(f"Food{i}" for i in range(n_foods)) + ("Load",)


def mpe_assignment_set(n_landmarks: int) -> tuple[str, ...]:
    return tuple(f"Landmark{i}" for i in range(n_landmarks)) + ("NoAction",)


def _lbf_layout(cfg: LbfConfig) -> tuple[LayoutField, ...]:
    fields = []
    k = 0
    for i in range(cfg.n_agents):
        fields.append(LayoutField(f"agent{i}", k, k + 3,
                                  f"agent {i}: (row, col, level), grid cells"))
        k += 3
    for j in range(cfg.n_foods):
        fields.append(LayoutField(f"food{j}", k, k + 3,
                                  f"food {j}: (row, col, level); level 0 once collected"))
        k += 3
    return tuple(fields)


def _mpe_layout(cfg: MpeSpreadConfig) -> tuple[LayoutField, ...]:
    fields = []
    k = 0
    for i in range(cfg.n_agents):
        fields.append(LayoutField(f"agent{i}", k, k + 4,
                                  f"agent {i}: (x, y, vx, vy), world units and world units/step"))
        k += 4
    for j in range(cfg.n_landmarks):
        fields.append(LayoutField(f"landmark{j}", k, k + 2, f"landmark {j}: (x, y), world units"))
        k += 2
    return tuple(fields)


def make_spec(cfg: EnvConfig) -> EnvSpec:
    """Build the EnvSpec for a validated environment config."""
    cfg.validate()
    if isinstance(cfg, LbfConfig):
        return EnvSpec(env_id=EnvId.LBF, n_agents=cfg.n_agents, n_targets=cfg.n_foods,
                       action_set=LBF_ACTIONS,
                       assignment_set=lbf_assignment_set(cfg.n_foods),
                       episode_limit=cfg.episode_limit, state_layout=_lbf_layout(cfg))
    return EnvSpec(env_id=EnvId.MPE_SPREAD, n_agents=cfg.n_agents, n_targets=cfg.n_landmarks,
                   action_set=MPE_ACTIONS,
                   assignment_set=mpe_assignment_set(cfg.n_landmarks),
                   episode_limit=cfg.episode_limit, state_layout=_mpe_layout(cfg))


def episode_return(rewards) -> float:
    """Sum of per-step environment rewards for one episode (never shaped rewards)."""
    return float(sum(rewards))
