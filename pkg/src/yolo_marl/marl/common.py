"""Shared training-side plumbing: observations, evaluation, metric rows."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..envs.core import EnvConfig, episode_return
from ..envs.sampling import make_env


def agent_observations(state: np.ndarray, n_agents: int, one_hot: bool = True) -> np.ndarray:
    """Per-agent observation rows. Full observability: each row is the global
    state, plus an agent-id one-hot when parameters are shared."""
    if not one_hot:
        return np.tile(state, (n_agents, 1))
    out = np.empty((n_agents, state.shape[0] + n_agents))
    out[:, :state.shape[0]] = state
    out[:, state.shape[0]:] = np.eye(n_agents)
    return out


def batch_observations(states: np.ndarray, n_agents: int) -> np.ndarray:
    """(B, S) states -> (B, n_agents, S + n_agents) one-hot-tagged rows."""
    B, S = states.shape
    out = np.empty((B, n_agents, S + n_agents))
    out[:, :, :S] = states[:, None, :]
    out[:, :, S:] = np.eye(n_agents)[None, :, :]
    return out


@dataclass
class MetricsRow:
    step: int
    mean_eval_return: float
    min_eval_return: float
    max_eval_return: float
    actor_loss: float | None = None
    critic_or_td_loss: float | None = None
    epsilon: float | None = None
    alignment_rate: float | None = None

    CSV_COLUMNS = ("step", "mean_eval_return", "min_eval_return", "max_eval_return",
                   "actor_loss", "critic_or_td_loss", "epsilon", "alignment_rate")

    def csv_values(self) -> list[str]:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, int):
                return str(v)
            return repr(float(v))
        return [fmt(getattr(self, c)) for c in self.CSV_COLUMNS]


def evaluate(policy, env_cfg: EnvConfig, n_episodes: int, seed: int):
    """Greedy rollouts on fresh environments; returns (mean, per-episode returns).

    Uses raw environment rewards only. Shaping never reaches this path, and
    nothing seen here enters any training buffer.
    """
    if n_episodes < 1:
        raise ValueError("n_episodes must be >= 1")
    env = make_env(env_cfg)
    returns = []
    for k in range(n_episodes):
        state = env.reset(seed=seed + k)
        rewards = []
        done = False
        while not done:
            result = env.step(policy.act_greedy(state))
            rewards.append(result.reward)
            state = result.next_state
            done = result.done
        returns.append(episode_return(rewards))
    return float(np.mean(returns)), returns
