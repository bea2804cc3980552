from .core import (
    A_EAST,
    A_LOAD,
    A_NONE,
    A_NORTH,
    A_SOUTH,
    A_WEST,
    EnvConfig,
    EnvId,
    EnvSpec,
    LBF_ACTIONS,
    LBF_MOVES,
    LayoutField,
    LbfConfig,
    M_DOWN,
    M_LEFT,
    M_NOOP,
    M_RIGHT,
    M_UP,
    MPE_ACTIONS,
    MPE_FORCES,
    MpeSpreadConfig,
    StepResult,
    episode_return,
    lbf_assignment_set,
    make_spec,
    mpe_assignment_set,
)
from .lbf import LbfEnv
from .mpe_spread import MpeSpreadEnv
from .sampling import default_config, make_env, sample_rollout_states

__all__ = [
    "A_EAST", "A_LOAD", "A_NONE", "A_NORTH", "A_SOUTH", "A_WEST",
    "EnvConfig", "EnvId", "EnvSpec", "LBF_ACTIONS", "LBF_MOVES", "LayoutField",
    "LbfConfig", "M_DOWN", "M_LEFT", "M_NOOP", "M_RIGHT", "M_UP",
    "MPE_ACTIONS", "MPE_FORCES", "MpeSpreadConfig", "StepResult",
    "episode_return", "lbf_assignment_set", "make_spec", "mpe_assignment_set",
    "LbfEnv", "MpeSpreadEnv", "default_config", "make_env", "sample_rollout_states",
]
