"""Random-rollout state sampling, shared by fuzz tests and planner validation."""

from __future__ import annotations

import numpy as np

from .core import EnvConfig, EnvId, LbfConfig, MpeSpreadConfig


def make_env(cfg: EnvConfig):
    from .lbf import LbfEnv
    from .mpe_spread import MpeSpreadEnv

    if isinstance(cfg, LbfConfig):
        return LbfEnv(cfg)
    return MpeSpreadEnv(cfg)


def default_config(env_id: EnvId | str, n_agents: int | None = None) -> EnvConfig:
    env_id = EnvId(env_id)
    if env_id is EnvId.LBF:
        if n_agents is None or n_agents == 2:
            return LbfConfig()
        return LbfConfig(n_agents=n_agents, agent_levels=(1,) * n_agents)
    return MpeSpreadConfig(n_agents=n_agents or 3)


def sample_rollout_states(cfg: EnvConfig, n_states: int, seed: int) -> list[np.ndarray]:
    """Collect reachable global states from uniformly random rollouts.

    Episodes reset from the derived seed stream, so (cfg, n_states, seed)
    always yields the same sequence.
    """
    env = make_env(cfg)
    rng = np.random.default_rng(seed)
    n_actions = len(env.spec.action_set)
    states = []
    state = env.reset(seed=int(rng.integers(0, 2**32)))
    states.append(state)
    while len(states) < n_states:
        action = rng.integers(0, n_actions, size=cfg.n_agents)
        result = env.step(action)
        if result.done:
            state = env.reset(seed=int(rng.integers(0, 2**32)))
        else:
            state = result.next_state
        states.append(state)
    return states[:n_states]
