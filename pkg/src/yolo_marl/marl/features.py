"""Policy-side input featurization.

Actors and critics receive only functions of the global state vector (full
observability is unchanged); these maps add fixed relational features
(per-agent target offsets, distances, adjacency/activity flags) that make
the geometry linearly accessible to small MLPs. ``raw`` keeps the plain
state vector for ablations.
"""

from __future__ import annotations

import numpy as np

from ..envs.core import EnvId, EnvSpec
from ..errors import ConfigError


class FeatureMap:
    """Maps (B, S) state batches to actor and critic input batches."""

    actor_dim: int
    critic_dim: int

    def actor_inputs(self, states: np.ndarray) -> np.ndarray:
        """(B, S) -> (B, n_agents, actor_dim)."""
        raise NotImplementedError

    def critic_inputs(self, states: np.ndarray) -> np.ndarray:
        """(B, S) -> (B, critic_dim)."""
        raise NotImplementedError


class RawFeatures(FeatureMap):
    """State vector passthrough plus an agent one-hot on the actor side."""

    def __init__(self, spec: EnvSpec, one_hot: bool = True):
        self.n_agents = spec.n_agents
        self.one_hot = one_hot
        self.actor_dim = spec.state_dim + (spec.n_agents if one_hot else 0)
        self.critic_dim = spec.state_dim

    def actor_inputs(self, states):
        B, S = states.shape
        n = self.n_agents
        if not self.one_hot:
            return np.repeat(states[:, None, :], n, axis=1)
        out = np.empty((B, n, S + n))
        out[:, :, :S] = states[:, None, :]
        out[:, :, S:] = np.eye(n)[None, :, :]
        return out

    def critic_inputs(self, states):
        return states


class LbfRelationalFeatures(FeatureMap):
    """Grid features: scaled state, per-food offsets/distance/adjacency/activity,
    offsets to the other agents, and an agent one-hot."""

    def __init__(self, spec: EnvSpec, grid_size: int):
        self.n_agents = spec.n_agents
        self.n_foods = spec.n_targets
        self.state_dim = spec.state_dim
        self.scale = float(grid_size)
        n, m = self.n_agents, self.n_foods
        self.actor_dim = spec.state_dim + 5 * m + 2 * (n - 1) + n
        self.critic_dim = spec.state_dim + n * 5 * m

    def _geometry(self, states):
        B = states.shape[0]
        n, m = self.n_agents, self.n_foods
        agents = states[:, :3 * n].reshape(B, n, 3)
        foods = states[:, 3 * n:].reshape(B, m, 3)
        rel = foods[:, None, :, :2] - agents[:, :, None, :2]        # (B, n, m, 2)
        man = np.abs(rel).sum(axis=3)                               # (B, n, m)
        adj = (man == 1.0).astype(np.float64)
        active = (foods[:, :, 2] > 0).astype(np.float64)            # (B, m)
        # (B, n, m, 5): offsets, distance, adjacency, target active
        block = np.concatenate([
            rel / self.scale, man[..., None] / (2 * self.scale),
            adj[..., None], np.broadcast_to(active[:, None, :, None], (B, n, m, 1)),
        ], axis=3)
        return agents, block

    def actor_inputs(self, states):
        B = states.shape[0]
        n = self.n_agents
        agents, block = self._geometry(states)
        scaled = states / self.scale
        pos = agents[:, :, :2]
        others = []
        for i in range(n):
            rest = np.concatenate([pos[:, :i], pos[:, i + 1:]], axis=1)
            others.append((rest - pos[:, i:i + 1]) / self.scale)
        others = np.stack(others, axis=1).reshape(B, n, -1)         # (B, n, 2(n-1))
        out = np.concatenate([
            np.repeat(scaled[:, None, :], n, axis=1),
            block.reshape(B, n, -1),
            others,
            np.broadcast_to(np.eye(n)[None], (B, n, n)),
        ], axis=2)
        return out

    def critic_inputs(self, states):
        B = states.shape[0]
        _, block = self._geometry(states)
        return np.concatenate([states / self.scale, block.reshape(B, -1)], axis=1)


class MpeRelationalFeatures(FeatureMap):
    """Particle features: own pose, landmark offsets and distances, offsets
    to the other agents, and an agent one-hot. World units are already O(1)."""

    def __init__(self, spec: EnvSpec):
        self.n_agents = spec.n_agents
        self.n_marks = spec.n_targets
        self.state_dim = spec.state_dim
        n, m = self.n_agents, self.n_marks
        self.actor_dim = 4 + 3 * m + 2 * (n - 1) + n
        self.critic_dim = spec.state_dim + n * 3 * m

    def _geometry(self, states):
        B = states.shape[0]
        n, m = self.n_agents, self.n_marks
        agents = states[:, :4 * n].reshape(B, n, 4)
        marks = states[:, 4 * n:].reshape(B, m, 2)
        rel = marks[:, None, :, :] - agents[:, :, None, :2]          # (B, n, m, 2)
        dist = np.sqrt((rel * rel).sum(axis=3))                      # (B, n, m)
        block = np.concatenate([rel, dist[..., None]], axis=3)       # (B, n, m, 3)
        return agents, block

    def actor_inputs(self, states):
        B = states.shape[0]
        n = self.n_agents
        agents, block = self._geometry(states)
        pos = agents[:, :, :2]
        others = []
        for i in range(n):
            rest = np.concatenate([pos[:, :i], pos[:, i + 1:]], axis=1)
            others.append(rest - pos[:, i:i + 1])
        others = np.stack(others, axis=1).reshape(B, n, -1)
        out = np.concatenate([
            agents,                                                  # own (x, y, vx, vy)
            block.reshape(B, n, -1),
            others,
            np.broadcast_to(np.eye(n)[None], (B, n, n)),
        ], axis=2)
        return out

    def critic_inputs(self, states):
        B = states.shape[0]
        _, block = self._geometry(states)
        return np.concatenate([states, block.reshape(B, -1)], axis=1)


def make_feature_map(spec: EnvSpec, kind: str, grid_size: int = 8,
                     one_hot: bool = True) -> FeatureMap:
    if kind == "raw":
        return RawFeatures(spec, one_hot=one_hot)
    if kind == "relational":
        if spec.env_id is EnvId.LBF:
            return LbfRelationalFeatures(spec, grid_size)
        return MpeRelationalFeatures(spec)
    raise ConfigError(f"unknown feature map {kind!r}", field="features")
