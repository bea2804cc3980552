from .common import MetricsRow, agent_observations, evaluate
from .mappo import MappoBatch, MappoConfig, MappoPolicy, compute_gae, mappo_update
from .qmix import (MonotonicMixer, QmixConfig, QmixOptimizers, QmixPolicy,
                   ReplayBuffer, epsilon_at, qmix_update, select_greedy)
from .train import TrainResult, Transition, train

__all__ = [
    "MetricsRow", "agent_observations", "evaluate",
    "MappoBatch", "MappoConfig", "MappoPolicy", "compute_gae", "mappo_update",
    "MonotonicMixer", "QmixConfig", "QmixOptimizers", "QmixPolicy",
    "ReplayBuffer", "epsilon_at", "qmix_update", "select_greedy",
    "TrainResult", "Transition", "train",
]
