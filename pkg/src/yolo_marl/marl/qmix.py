"""QMIX: per-agent Q networks combined by a state-conditioned monotonic mixer.

Mixing weights come from hypernetworks of the global state and pass through
an absolute value, so every d(Q_tot)/d(Q_i) is nonnegative and greedy joint
action selection decomposes into per-agent argmaxes.
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
class QmixConfig:
    gamma: float = 0.99
    replay_capacity: int = 50_000
    batch_size: int = 256
    target_update_interval: int = 200   # env steps between hard target syncs
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_steps: int = 50_000
    mixing_embed_dim: int = 32
    lr: float = 5e-4
    hidden_sizes: tuple[int, ...] = (64, 64)
    activation: str = "relu"
    update_every: int = 4               # env steps between gradient updates
    learning_starts: int = 1_000
    features: str = "relational"        # "relational" | "raw"

    def validate(self) -> None:
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigError("gamma must lie in [0, 1)", field="qmix.gamma")
        if self.replay_capacity < self.batch_size:
            raise ConfigError("replay_capacity must be >= batch_size",
                              field="qmix.replay_capacity")
        for name in ("epsilon_start", "epsilon_end"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]", field=f"qmix.{name}")
        if self.update_every < 1 or self.target_update_interval < 1:
            raise ConfigError("intervals must be >= 1", field="qmix")


def epsilon_at(cfg: QmixConfig, step: int) -> float:
    frac = min(1.0, step / max(1, cfg.epsilon_decay_steps))
    return cfg.epsilon_start + frac * (cfg.epsilon_end - cfg.epsilon_start)


def select_greedy(q_values: np.ndarray) -> np.ndarray:
    """Per-agent argmax over the last axis; invariant to constant shifts."""
    return q_values.argmax(axis=-1)


def _elu(x):
    return np.where(x > 0.0, x, np.expm1(x))


def _elu_prime(x):
    return np.where(x > 0.0, 1.0, np.exp(x))


class MonotonicMixer:
    """Q_tot(q, s) = w2(s)^T elu(W1(s)^T q + b1(s)) + v(s), weights >= 0."""

    def __init__(self, state_dim: int, n_agents: int, embed_dim: int,
                 rng: np.random.Generator):
        self.n_agents = n_agents
        self.embed_dim = embed_dim
        self.hyper_w1 = init_mlp((state_dim, n_agents * embed_dim), rng=rng)
        self.hyper_b1 = init_mlp((state_dim, embed_dim), rng=rng)
        self.hyper_w2 = init_mlp((state_dim, embed_dim), rng=rng, final_gain=0.1)
        self.hyper_v = init_mlp((state_dim, embed_dim, 1), "relu", rng=rng)

    def nets(self) -> dict[str, Mlp]:
        return {"hyper_w1": self.hyper_w1, "hyper_b1": self.hyper_b1,
                "hyper_w2": self.hyper_w2, "hyper_v": self.hyper_v}

    def forward(self, q: np.ndarray, states: np.ndarray, with_cache: bool = False):
        """(B, n) agent values + (B, S) states -> (B,) joint values."""
        B = q.shape[0]
        w1_raw = self.hyper_w1.forward(states)
        w1 = np.abs(w1_raw).reshape(B, self.n_agents, self.embed_dim)
        b1 = self.hyper_b1.forward(states)
        pre = np.einsum("bn,bne->be", q, w1) + b1
        h = _elu(pre)
        w2_raw = self.hyper_w2.forward(states)
        w2 = np.abs(w2_raw)
        v = self.hyper_v.forward(states)[:, 0]
        q_tot = (h * w2).sum(axis=1) + v
        if with_cache:
            return q_tot, (w1_raw, w1, pre, h, w2_raw, w2)
        return q_tot

    def backward(self, q, states, cache, grad_out):
        """Gradients of <Q_tot, grad_out>: returns (dq, {net name: flat grad})."""
        w1_raw, w1, pre, h, w2_raw, w2 = cache
        g = grad_out[:, None]
        grads = {}
        grads["hyper_v"] = self.hyper_v.backward(states, g)
        dw2 = g * h
        grads["hyper_w2"] = self.hyper_w2.backward(states, dw2 * np.sign(w2_raw))
        dh = g * w2
        dpre = dh * _elu_prime(pre)
        dq = np.einsum("be,bne->bn", dpre, w1)
        dw1 = np.einsum("bn,be->bne", q, dpre)
        dw1_raw = dw1.reshape(states.shape[0], -1) * np.sign(w1_raw)
        grads["hyper_w1"] = self.hyper_w1.backward(states, dw1_raw)
        grads["hyper_b1"] = self.hyper_b1.backward(states, dpre)
        return dq, grads

    def clone(self) -> "MonotonicMixer":
        twin = MonotonicMixer.__new__(MonotonicMixer)
        twin.n_agents = self.n_agents
        twin.embed_dim = self.embed_dim
        for name, net in self.nets().items():
            setattr(twin, name, net.clone())
        return twin

    def copy_from(self, other: "MonotonicMixer") -> None:
        for name, net in self.nets().items():
            net.set_params(other.nets()[name].params)


class QmixPolicy:
    def __init__(self, state_dim: int, n_agents: int, n_actions: int,
                 cfg: QmixConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.n_agents = n_agents
        self.n_actions = n_actions
        self.state_dim = state_dim
        obs_dim = state_dim + n_agents
        self.agent_net = init_mlp((obs_dim, *cfg.hidden_sizes, n_actions),
                                  cfg.activation, rng=rng)
        self.mixer = MonotonicMixer(state_dim, n_agents, cfg.mixing_embed_dim, rng)
        self.target_agent_net = self.agent_net.clone()
        self.target_mixer = self.mixer.clone()

    def q_values(self, state: np.ndarray, target: bool = False) -> np.ndarray:
        net = self.target_agent_net if target else self.agent_net
        return net.forward(agent_observations(state, self.n_agents))

    def q_values_batch(self, states: np.ndarray, target: bool = False) -> np.ndarray:
        B = states.shape[0]
        obs = batch_observations(states, self.n_agents)
        net = self.target_agent_net if target else self.agent_net
        return net.forward(obs.reshape(B * self.n_agents, -1)) \
            .reshape(B, self.n_agents, self.n_actions)

    def act_greedy(self, state: np.ndarray) -> list[int]:
        return list(select_greedy(self.q_values(state)))

    def act_epsilon_greedy(self, state: np.ndarray, epsilon: float,
                           rng: np.random.Generator) -> list[int]:
        greedy = select_greedy(self.q_values(state))
        randoms = rng.integers(0, self.n_actions, size=self.n_agents)
        explore = rng.random(self.n_agents) < epsilon
        return list(np.where(explore, randoms, greedy))

    def sync_targets(self) -> None:
        self.target_agent_net.set_params(self.agent_net.params)
        self.target_mixer.copy_from(self.mixer)

    def save(self, directory) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        self.agent_net.save(d / "agent.mlp")
        for name, net in self.mixer.nets().items():
            net.save(d / f"{name}.mlp")

    def load(self, directory) -> None:
        d = Path(directory)
        self.agent_net = Mlp.load(d / "agent.mlp")
        for name in self.mixer.nets():
            setattr(self.mixer, name, Mlp.load(d / f"{name}.mlp"))
        self.sync_targets()


class ReplayBuffer:
    """Flat transition ring buffer (both environments are fully observable)."""

    def __init__(self, capacity: int, state_dim: int, n_agents: int):
        self.capacity = capacity
        self.states = np.empty((capacity, state_dim))
        self.actions = np.empty((capacity, n_agents), dtype=np.int64)
        self.rewards = np.empty(capacity)
        self.dones = np.empty(capacity)
        self.next_states = np.empty((capacity, state_dim))
        self.size = 0
        self._head = 0

    def add(self, state, actions, reward, done, next_state) -> None:
        k = self._head
        self.states[k] = state
        self.actions[k] = actions
        self.rewards[k] = reward
        self.dones[k] = float(done)
        self.next_states[k] = next_state
        self._head = (k + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator):
        idx = rng.integers(0, self.size, size=batch_size)
        return (self.states[idx], self.actions[idx], self.rewards[idx],
                self.dones[idx], self.next_states[idx])


@dataclass
class QmixOptimizers:
    agent: AdamState
    mixer: dict[str, AdamState]

    @classmethod
    def create(cls, policy: QmixPolicy, lr: float) -> "QmixOptimizers":
        return cls(agent=AdamState(lr=lr),
                   mixer={name: AdamState(lr=lr) for name in policy.mixer.nets()})


def qmix_update(batch, cfg: QmixConfig, policy: QmixPolicy,
                opts: QmixOptimizers) -> float:
    """One TD step on a sampled batch; returns the scalar TD loss."""
    states, actions, rewards, dones, next_states = batch
    B, n = actions.shape

    obs = batch_observations(states, n).reshape(B * n, -1)
    q_all = policy.agent_net.forward(obs).reshape(B, n, policy.n_actions)
    q_taken = np.take_along_axis(q_all, actions[..., None], axis=-1)[..., 0]
    q_tot, cache = policy.mixer.forward(q_taken, states, with_cache=True)

    q_next = policy.q_values_batch(next_states, target=True).max(axis=-1)
    q_tot_next = policy.target_mixer.forward(q_next, next_states)
    targets = rewards + cfg.gamma * (1.0 - dones) * q_tot_next

    td = q_tot - targets
    loss = float(np.mean(td * td))

    dq_tot = 2.0 * td / B
    dq_taken, mixer_grads = policy.mixer.backward(q_taken, states, cache, dq_tot)
    dq_all = np.zeros_like(q_all)
    np.put_along_axis(dq_all, actions[..., None], dq_taken[..., None], axis=-1)
    agent_grad = policy.agent_net.backward(obs, dq_all.reshape(B * n, -1))

    for grad in (agent_grad, *mixer_grads.values()):
        if not np.all(np.isfinite(grad)):
            raise OptimizerError("non-finite QMIX gradient")

    new_params, _ = adam_step(opts.agent, policy.agent_net.params, agent_grad)
    policy.agent_net.set_params(new_params)
    for name, net in policy.mixer.nets().items():
        new_params, _ = adam_step(opts.mixer[name], net.params, mixer_grads[name])
        net.set_params(new_params)
    return loss
