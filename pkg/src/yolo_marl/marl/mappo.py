"""MAPPO: decentralized softmax actors, one centralized value net.

The actor is shared across agents (agent-id one-hot appended to the
observation) unless parameter sharing is disabled, in which case each agent
owns a net. Updates use clipped surrogate + clipped value loss + entropy
bonus on GAE advantages computed from the (possibly shaped) reward stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..envs.core import EnvSpec
from ..errors import ConfigError, OptimizerError
from ..nets import AdamState, Mlp, adam_step, init_mlp
from .features import FeatureMap, make_feature_map


@dataclass(frozen=True)
class MappoConfig:
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip_eps: float = 0.2
    epochs: int = 4
    minibatches: int = 4
    rollout_length: int = 128          # env steps per parallel env between updates
    n_envs: int = 8
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    actor_lr: float = 3e-4
    critic_lr: float = 1e-3
    hidden_sizes: tuple[int, ...] = (64, 64)
    activation: str = "relu"
    parameter_sharing: bool = True
    normalize_advantages: bool = True
    features: str = "relational"  # "relational" | "raw"

    def validate(self) -> None:
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigError("gamma must lie in [0, 1)", field="mappo.gamma")
        if not 0.0 <= self.gae_lambda <= 1.0:
            raise ConfigError("gae_lambda must lie in [0, 1]", field="mappo.gae_lambda")
        if self.clip_eps <= 0:
            raise ConfigError("clip_eps must be > 0", field="mappo.clip_eps")
        for name in ("epochs", "minibatches", "rollout_length", "n_envs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1", field=f"mappo.{name}")


class MappoPolicy:
    def __init__(self, spec: EnvSpec, cfg: MappoConfig, rng: np.random.Generator,
                 fmap: FeatureMap | None = None, feature_scale: float = 8.0):
        self.cfg = cfg
        self.n_agents = spec.n_agents
        self.n_actions = len(spec.action_set)
        self.shared = cfg.parameter_sharing
        self.fmap = fmap or make_feature_map(spec, cfg.features, grid_size=feature_scale,
                                             one_hot=self.shared)
        sizes = (self.fmap.actor_dim, *cfg.hidden_sizes, self.n_actions)
        n_nets = 1 if self.shared else self.n_agents
        self.actors = [init_mlp(sizes, cfg.activation, rng=rng, final_gain=0.01)
                       for _ in range(n_nets)]
        self.critic = init_mlp((self.fmap.critic_dim, *cfg.hidden_sizes, 1),
                               cfg.activation, rng=rng)

    def actor_for(self, agent: int) -> Mlp:
        return self.actors[0] if self.shared else self.actors[agent]

    def batch_obs(self, states: np.ndarray) -> np.ndarray:
        return self.fmap.actor_inputs(states)

    def logits(self, states: np.ndarray) -> np.ndarray:
        """(E, S) batch of global states -> (E, N, A) logits."""
        E = states.shape[0]
        obs = self.batch_obs(states)
        if self.shared:
            return self.actors[0].forward(obs.reshape(E * self.n_agents, -1)) \
                .reshape(E, self.n_agents, self.n_actions)
        out = np.empty((E, self.n_agents, self.n_actions))
        for i in range(self.n_agents):
            out[:, i] = self.actors[i].forward(obs[:, i])
        return out

    def values(self, states: np.ndarray) -> np.ndarray:
        return self.critic.forward(self.fmap.critic_inputs(states))[:, 0]

    def act_sample(self, states: np.ndarray, rng: np.random.Generator):
        """Sample one joint action per state row; returns (actions, logps)."""
        logp = log_softmax(self.logits(states))
        p = np.exp(logp)
        u = rng.random(p.shape[:2])
        actions = (u[..., None] > p.cumsum(axis=-1)).sum(axis=-1)
        np.clip(actions, 0, self.n_actions - 1, out=actions)
        taken = np.take_along_axis(logp, actions[..., None], axis=-1)[..., 0]
        return actions, taken

    def act_greedy(self, state: np.ndarray) -> list[int]:
        return list(self.logits(state[None, :])[0].argmax(axis=-1))

    def save(self, directory) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        for i, net in enumerate(self.actors):
            net.save(d / f"actor{i}.mlp")
        self.critic.save(d / "critic.mlp")

    def load(self, directory) -> None:
        d = Path(directory)
        for i in range(len(self.actors)):
            self.actors[i] = Mlp.load(d / f"actor{i}.mlp")
        self.critic = Mlp.load(d / "critic.mlp")


def log_softmax(z: np.ndarray) -> np.ndarray:
    m = z.max(axis=-1, keepdims=True)
    s = z - m
    return s - np.log(np.exp(s).sum(axis=-1, keepdims=True))


def compute_gae(rewards: np.ndarray, values: np.ndarray, bootstrap: np.ndarray,
                dones: np.ndarray, gamma: float, lam: float) -> np.ndarray:
    """Advantages over a (T, E) reward block.

    ``values`` is (T, E) state values, ``bootstrap`` the (E,) value of the
    state after the last step; terminal steps cut the recursion.
    """
    T, E = rewards.shape
    adv = np.zeros((T, E))
    next_v = bootstrap
    gae = np.zeros(E)
    for t in range(T - 1, -1, -1):
        alive = 1.0 - dones[t]
        delta = rewards[t] + gamma * next_v * alive - values[t]
        gae = delta + gamma * lam * alive * gae
        adv[t] = gae
        next_v = values[t]
    return adv


@dataclass
class MappoBatch:
    """One completed rollout, flattened per env step."""

    critic_inputs: np.ndarray  # (B, C)
    obs: np.ndarray            # (B, N, actor_dim)
    actions: np.ndarray        # (B, N)
    logps_old: np.ndarray      # (B, N)
    values_old: np.ndarray     # (B,)
    advantages: np.ndarray     # (B,)
    returns: np.ndarray        # (B,)


def mappo_update(batch: MappoBatch, cfg: MappoConfig, policy: MappoPolicy,
                 actor_opts: list[AdamState], critic_opt: AdamState,
                 rng: np.random.Generator):
    """Run the clipped PPO epochs on one rollout; returns (actor_loss, value_loss)."""
    B, N = batch.actions.shape
    adv = batch.advantages
    if cfg.normalize_advantages and B > 1:
        adv = (adv - adv.mean()) / (adv.std() + 1e-8)

    actor_losses, value_losses = [], []
    mb_size = max(1, B // cfg.minibatches)
    for _ in range(cfg.epochs):
        order = rng.permutation(B)
        for start in range(0, B, mb_size):
            idx = order[start:start + mb_size]
            a_loss = _actor_step(batch, idx, adv, cfg, policy, actor_opts)
            v_loss = _critic_step(batch, idx, cfg, policy, critic_opt)
            actor_losses.append(a_loss)
            value_losses.append(v_loss)
    return float(np.mean(actor_losses)), float(np.mean(value_losses))


def _actor_step(batch, idx, adv, cfg, policy, actor_opts):
    N = batch.actions.shape[1]
    n_rows = len(idx) * N
    obs = batch.obs[idx].reshape(n_rows, -1)
    actions = batch.actions[idx].reshape(n_rows)
    logp_old = batch.logps_old[idx].reshape(n_rows)
    advantages = np.repeat(adv[idx], N)

    if policy.shared:
        nets = [(0, policy.actors[0], np.arange(n_rows))]
    else:
        row_grid = np.arange(n_rows).reshape(len(idx), N)
        nets = [(i, policy.actors[i], row_grid[:, i]) for i in range(N)]

    total_loss = 0.0
    for net_idx, net, rows in nets:
        x = obs[rows]
        z = net.forward(x)
        logp = log_softmax(z)
        p = np.exp(logp)
        a = actions[rows]
        lp_taken = logp[np.arange(len(rows)), a]
        ratio = np.exp(lp_taken - logp_old[rows])
        A = advantages[rows]

        s1 = ratio * A
        s2 = np.clip(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps) * A
        surrogate = np.minimum(s1, s2)
        entropy = -(p * logp).sum(axis=1)
        loss = -surrogate.mean() - cfg.entropy_coef * entropy.mean()
        total_loss += float(loss) * (len(rows) / len(actions))

        # d(-surrogate)/dlogits: gradient flows through ratio only where the
        # unclipped branch is active.
        clipped_out = ((ratio > 1.0 + cfg.clip_eps) & (A > 0)) | \
                      ((ratio < 1.0 - cfg.clip_eps) & (A < 0))
        g_ratio = np.where(clipped_out, 0.0, A)
        one_hot = np.zeros_like(p)
        one_hot[np.arange(len(rows)), a] = 1.0
        dz = -(g_ratio * ratio)[:, None] * (one_hot - p)
        # d(-coef * H)/dlogits = coef * p * (log p + H)
        dz += cfg.entropy_coef * p * (logp + entropy[:, None])
        dz /= len(rows)

        grad = net.backward(x, dz)
        if not np.all(np.isfinite(grad)):
            raise OptimizerError("non-finite actor gradient")
        new_params, _ = adam_step(actor_opts[net_idx], net.params, grad)
        net.set_params(new_params)
    return total_loss


def _critic_step(batch, idx, cfg, policy, critic_opt):
    x = batch.critic_inputs[idx]
    ret = batch.returns[idx]
    v_old = batch.values_old[idx]
    v = policy.critic.forward(x)[:, 0]
    v_clip = v_old + np.clip(v - v_old, -cfg.clip_eps, cfg.clip_eps)
    e1 = (v - ret) ** 2
    e2 = (v_clip - ret) ** 2
    loss = cfg.value_coef * 0.5 * np.maximum(e1, e2).mean()

    use_unclipped = e1 >= e2
    in_band = np.abs(v - v_old) < cfg.clip_eps
    dv = np.where(use_unclipped, v - ret, np.where(in_band, v_clip - ret, 0.0))
    dv *= cfg.value_coef / len(idx)
    grad = policy.critic.backward(x, dv[:, None])
    if not np.all(np.isfinite(grad)):
        raise OptimizerError("non-finite critic gradient")
    new_params, _ = adam_step(critic_opt, policy.critic.params, grad)
    policy.critic.set_params(new_params)
    return float(loss)
