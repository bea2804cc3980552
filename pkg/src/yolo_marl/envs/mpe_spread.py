"""Particle landmark-coverage world (discrete action variant).

State vector layout: per-agent (x, y, vx, vy), then per-landmark (x, y).
Per step, each agent's velocity is damped, accelerated by its action force,
speed-clipped, and integrated; positions are clipped to the world box.

Shared reward per step:
    -(sum over landmarks of the distance to the closest agent)
    - collision_penalty * (number of agent pairs closer than 2 * collision_radius)
"""

from __future__ import annotations

import numpy as np

from .core import MPE_FORCES, MpeSpreadConfig, StepResult, make_spec


class MpeSpreadEnv:
    """Single-threaded environment instance; owns its RNG stream."""

    def __init__(self, config: MpeSpreadConfig | None = None):
        self.config = config or MpeSpreadConfig()
        self.spec = make_spec(self.config)
        self._rng = np.random.default_rng(self.config.rng_seed)
        n = self.config.n_agents
        self._pos = np.zeros((n, 2))
        self._vel = np.zeros((n, 2))
        self._landmarks = np.zeros((self.config.n_landmarks, 2))
        self._t = 0

    def state(self) -> np.ndarray:
        return np.concatenate(
            [np.concatenate([self._pos, self._vel], axis=1).ravel(),
             self._landmarks.ravel()])

    def reset(self, seed: int | None = None) -> np.ndarray:
        cfg = self.config
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        rng = self._rng
        self._pos = rng.uniform(-1.0, 1.0, size=(cfg.n_agents, 2))
        self._vel = np.zeros((cfg.n_agents, 2))
        self._landmarks = rng.uniform(-1.0, 1.0, size=(cfg.n_landmarks, 2))
        self._t = 0
        return self.state()

    def step(self, action) -> StepResult:
        cfg = self.config
        acts = self.spec.validate_action(action)

        force = np.array([MPE_FORCES[a] for a in acts])
        self._vel = self._vel * (1.0 - cfg.damping) + force * (cfg.accel * cfg.dt)
        speed = np.linalg.norm(self._vel, axis=1)
        over = speed > cfg.max_speed
        if over.any():
            self._vel[over] *= (cfg.max_speed / speed[over])[:, None]
        self._pos = np.clip(self._pos + self._vel * cfg.dt,
                            -cfg.world_extent, cfg.world_extent)

        # Landmark coverage term: closest agent per landmark.
        diff = self._landmarks[:, None, :] - self._pos[None, :, :]
        dists = np.sqrt((diff * diff).sum(axis=2))
        coverage = dists.min(axis=1).sum()

        # Pairwise collision count.
        pair = self._pos[:, None, :] - self._pos[None, :, :]
        pair_d = np.sqrt((pair * pair).sum(axis=2))
        iu = np.triu_indices(cfg.n_agents, k=1)
        collisions = int((pair_d[iu] < 2.0 * cfg.collision_radius).sum())

        reward = -float(coverage) - cfg.collision_penalty * collisions
        self._t += 1
        done = self._t >= cfg.episode_limit
        return StepResult(next_state=self.state(), reward=reward, done=done,
                          info={"collision_count": collisions, "t": self._t})
