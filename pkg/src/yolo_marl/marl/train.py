"""Training loop with one-shot planning-function reward shaping.

Per environment step: interpret the global state, query the planning
function for per-agent assignments, act with the current policy, shape the
reward by per-agent alignment, and hand the shaped reward to the learner.
The planner is queried only while shaping is enabled, so a disabled run is
bit-identical to one with the planning machinery absent. Nothing in this
module (or anything it imports) touches the LLM pipeline; planners arrive
here as already-validated artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..envs.core import EnvConfig, EnvSpec, make_spec
from ..envs.sampling import make_env
from ..errors import (ConfigError, PlannerProtocolError, PlannerTimeoutError,
                      TrainingAbortError)
from ..interp import interpret
from ..nets import AdamState
from ..planning.artifact import PlanningArtifact
from ..planning.external import ExternalPlanner
from ..planning.reference import plan_reference
from ..shaping import ShapedStep, ShapingConfig, shape
from .common import MetricsRow, evaluate
from .mappo import MappoBatch, MappoConfig, MappoPolicy, compute_gae, mappo_update
from .qmix import (QmixConfig, QmixOptimizers, QmixPolicy, ReplayBuffer,
                   epsilon_at, qmix_update)


@dataclass
class Transition:
    """One environment step as stored for training."""

    state: np.ndarray
    actions: list[int]
    env_reward: float
    shaped_reward: float
    aligned: tuple[bool, ...]
    done: bool
    next_state: np.ndarray
    log_probs: np.ndarray | None = None  # per agent, MAPPO only


@dataclass
class TrainResult:
    policy: object
    metrics: list[MetricsRow]
    algorithm: str
    total_steps: int
    planner_kind: str  # "reference" | "external" | "none"


class _StepShaper:
    """Interpret + plan + align for one env step; tracks alignment stats."""

    def __init__(self, spec: EnvSpec, shaping_cfg: ShapingConfig, planner_fn,
                 fallback: bool):
        self.spec = spec
        self.cfg = shaping_cfg
        self.planner_fn = planner_fn
        self.fallback = fallback
        self.aligned_count = 0
        self.total_count = 0

    def assignments(self, state_vec: np.ndarray):
        s = interpret(state_vec, self.spec)
        try:
            return s, self.planner_fn(s)
        except (PlannerProtocolError, PlannerTimeoutError) as exc:
            if not self.fallback:
                raise TrainingAbortError(f"planner failed mid-training: {exc}") from exc
            self.planner_fn = lambda st: plan_reference(st, self.spec)
            return s, self.planner_fn(s)

    def shape_step(self, env_reward: float, actions, assignments, interp_state) -> ShapedStep:
        step = shape(env_reward, actions, assignments, interp_state, self.spec, self.cfg)
        self.aligned_count += sum(step.aligned)
        self.total_count += len(step.aligned)
        return step

    def drain_alignment_rate(self):
        if self.total_count == 0:
            return None
        rate = self.aligned_count / self.total_count
        self.aligned_count = 0
        self.total_count = 0
        return rate


def _resolve_planner(artifact: PlanningArtifact | None, spec: EnvSpec,
                     shaping_cfg: ShapingConfig, planner_timeout: float):
    """Returns (planner_fn or None, session or None, kind)."""
    if artifact is None:
        if shaping_cfg.enabled:
            raise ConfigError("shaping is enabled but no planning artifact was given",
                              field="planner")
        return None, None, "none"
    if artifact.kind == "reference":
        return (lambda s: plan_reference(s, spec)), None, "reference"
    session = ExternalPlanner(artifact, spec, timeout=planner_timeout).start()
    return session.plan, session, "external"


def train(env_cfg: EnvConfig, algo_cfg, shaping_cfg: ShapingConfig,
          artifact: PlanningArtifact | None, total_steps: int, seed: int,
          eval_interval: int | None = None, eval_episodes: int = 16,
          planner_timeout: float = 1.0, fallback_to_reference: bool = False) -> TrainResult:
    """Train one policy; fully determined by (configs, seed).

    Evaluation checkpoints use raw environment returns and a seed stream
    independent of training, so both legs of a comparison see identical
    evaluation episodes.
    """
    shaping_cfg.validate()
    spec = make_spec(env_cfg)
    planner_fn, session, planner_kind = _resolve_planner(
        artifact, spec, shaping_cfg, planner_timeout)
    shaping_on = shaping_cfg.enabled and planner_fn is not None
    shaper = _StepShaper(spec, shaping_cfg, planner_fn, fallback_to_reference) \
        if shaping_on else None
    if eval_interval is None:
        eval_interval = max(1, total_steps // 10) if total_steps else 1

    try:
        if isinstance(algo_cfg, MappoConfig):
            return _train_mappo(env_cfg, spec, algo_cfg, shaper, total_steps, seed,
                                eval_interval, eval_episodes, planner_kind)
        if isinstance(algo_cfg, QmixConfig):
            return _train_qmix(env_cfg, spec, algo_cfg, shaper, total_steps, seed,
                               eval_interval, eval_episodes, planner_kind)
        raise ConfigError(f"unknown algorithm config {type(algo_cfg).__name__}",
                          field="algorithm")
    finally:
        if session is not None:
            session.close()


class _Checkpointer:
    def __init__(self, policy, env_cfg, eval_interval, eval_episodes, eval_seed_base,
                 total_steps):
        self.policy = policy
        self.env_cfg = env_cfg
        self.interval = eval_interval
        self.episodes = eval_episodes
        self.base = eval_seed_base
        self.total = total_steps
        self.next_at = eval_interval
        self.rows: list[MetricsRow] = []

    def maybe_eval(self, steps_done, actor_loss, critic_loss, epsilon, alignment_rate,
                   force=False):
        due = steps_done >= self.next_at
        if not due and not (force and (not self.rows or self.rows[-1].step < steps_done)):
            return
        mean, per_ep = evaluate(self.policy, self.env_cfg, self.episodes,
                                seed=self.base + steps_done)
        self.rows.append(MetricsRow(
            step=steps_done, mean_eval_return=mean,
            min_eval_return=float(np.min(per_ep)), max_eval_return=float(np.max(per_ep)),
            actor_loss=actor_loss, critic_or_td_loss=critic_loss,
            epsilon=epsilon, alignment_rate=alignment_rate))
        while self.next_at <= steps_done:
            self.next_at += self.interval


def _train_mappo(env_cfg, spec, cfg: MappoConfig, shaper, total_steps, seed,
                 eval_interval, eval_episodes, planner_kind) -> TrainResult:
    cfg.validate()
    ss = np.random.SeedSequence([seed, 0x4D4150])
    init_rng, sample_rng, env_rng, eval_rng = map(np.random.default_rng, ss.spawn(4))
    eval_seed_base = int(eval_rng.integers(0, 2**31))

    policy = MappoPolicy(spec.state_dim, spec.n_agents, len(spec.action_set), cfg, init_rng)
    actor_opts = [AdamState(lr=cfg.actor_lr) for _ in policy.actors]
    critic_opt = AdamState(lr=cfg.critic_lr)

    envs = [make_env(env_cfg) for _ in range(cfg.n_envs)]
    states = np.stack([env.reset(seed=int(env_rng.integers(0, 2**31))) for env in envs])

    checkpointer = _Checkpointer(policy, env_cfg, eval_interval, eval_episodes,
                                 eval_seed_base, total_steps)
    steps_done = 0
    last_actor_loss = last_critic_loss = None

    while steps_done < total_steps:
        T = min(cfg.rollout_length,
                max(1, -(-(total_steps - steps_done) // cfg.n_envs)))
        E, N = cfg.n_envs, spec.n_agents
        r_states = np.empty((T, E, spec.state_dim))
        r_obs = np.empty((T, E, N, policy.actors[0].layer_sizes[0]))
        r_actions = np.empty((T, E, N), dtype=np.int64)
        r_logps = np.empty((T, E, N))
        r_values = np.empty((T, E))
        r_rewards = np.empty((T, E))
        r_dones = np.empty((T, E))

        for t in range(T):
            assignments = []
            interp_states = []
            if shaper is not None:
                for e in range(E):
                    s_i, asg = shaper.assignments(states[e])
                    interp_states.append(s_i)
                    assignments.append(asg)
            actions, logps = policy.act_sample(states, sample_rng)
            values = policy.values(states)
            r_states[t] = states
            r_obs[t] = policy.batch_obs(states)
            r_actions[t] = actions
            r_logps[t] = logps
            r_values[t] = values

            for e, env in enumerate(envs):
                result = env.step(actions[e])
                if shaper is not None:
                    shaped = shaper.shape_step(result.reward, list(actions[e]),
                                               assignments[e], interp_states[e])
                    r_rewards[t, e] = shaped.total
                else:
                    r_rewards[t, e] = result.reward
                r_dones[t, e] = float(result.done)
                states[e] = env.reset() if result.done else result.next_state
            steps_done += E

        bootstrap = policy.values(states)
        adv = compute_gae(r_rewards, r_values, bootstrap, r_dones, cfg.gamma, cfg.gae_lambda)
        returns = adv + r_values
        batch = MappoBatch(
            states=r_states.reshape(T * E, -1),
            obs=r_obs.reshape(T * E, N, -1),
            actions=r_actions.reshape(T * E, N),
            logps_old=r_logps.reshape(T * E, N),
            values_old=r_values.reshape(T * E),
            advantages=adv.reshape(T * E),
            returns=returns.reshape(T * E),
        )
        last_actor_loss, last_critic_loss = mappo_update(
            batch, cfg, policy, actor_opts, critic_opt, sample_rng)

        checkpointer.maybe_eval(steps_done, last_actor_loss, last_critic_loss, None,
                                shaper.drain_alignment_rate() if shaper else None)

    checkpointer.maybe_eval(steps_done, last_actor_loss, last_critic_loss, None,
                            shaper.drain_alignment_rate() if shaper else None,
                            force=steps_done > 0)
    return TrainResult(policy=policy, metrics=checkpointer.rows, algorithm="mappo",
                       total_steps=steps_done, planner_kind=planner_kind)


def _train_qmix(env_cfg, spec, cfg: QmixConfig, shaper, total_steps, seed,
                eval_interval, eval_episodes, planner_kind) -> TrainResult:
    cfg.validate()
    ss = np.random.SeedSequence([seed, 0x514D49])
    init_rng, act_rng, env_rng, eval_rng, replay_rng = map(np.random.default_rng, ss.spawn(5))
    eval_seed_base = int(eval_rng.integers(0, 2**31))

    policy = QmixPolicy(spec.state_dim, spec.n_agents, len(spec.action_set), cfg, init_rng)
    opts = QmixOptimizers.create(policy, cfg.lr)
    replay = ReplayBuffer(cfg.replay_capacity, spec.state_dim, spec.n_agents)

    env = make_env(env_cfg)
    state = env.reset(seed=int(env_rng.integers(0, 2**31)))

    checkpointer = _Checkpointer(policy, env_cfg, eval_interval, eval_episodes,
                                 eval_seed_base, total_steps)
    losses: list[float] = []
    last_loss = None
    epsilon = epsilon_at(cfg, 0)

    for step in range(1, total_steps + 1):
        epsilon = epsilon_at(cfg, step - 1)
        if shaper is not None:
            interp_state, assignments = shaper.assignments(state)
        actions = policy.act_epsilon_greedy(state, epsilon, act_rng)
        result = env.step(actions)
        if shaper is not None:
            shaped = shaper.shape_step(result.reward, actions, assignments, interp_state)
            tr = Transition(state=state, actions=actions, env_reward=result.reward,
                            shaped_reward=shaped.total, aligned=shaped.aligned,
                            done=result.done, next_state=result.next_state)
        else:
            tr = Transition(state=state, actions=actions, env_reward=result.reward,
                            shaped_reward=result.reward, aligned=(),
                            done=result.done, next_state=result.next_state)
        replay.add(tr.state, tr.actions, tr.shaped_reward, tr.done, tr.next_state)
        state = env.reset() if result.done else result.next_state

        if step >= cfg.learning_starts and step % cfg.update_every == 0 \
                and replay.size >= cfg.batch_size:
            batch = replay.sample(cfg.batch_size, replay_rng)
            losses.append(qmix_update(batch, cfg, policy, opts))
        if step % cfg.target_update_interval == 0:
            policy.sync_targets()

        if step >= checkpointer.next_at:
            last_loss = float(np.mean(losses)) if losses else None
            losses.clear()
            checkpointer.maybe_eval(step, None, last_loss, epsilon,
                                    shaper.drain_alignment_rate() if shaper else None)

    if total_steps > 0:
        last_loss = float(np.mean(losses)) if losses else last_loss
        checkpointer.maybe_eval(total_steps, None, last_loss, epsilon,
                                shaper.drain_alignment_rate() if shaper else None,
                                force=True)
    return TrainResult(policy=policy, metrics=checkpointer.rows, algorithm="qmix",
                       total_steps=total_steps, planner_kind=planner_kind)
