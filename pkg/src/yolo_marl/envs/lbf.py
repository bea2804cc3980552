"""Level-based foraging on a square grid with forced cooperation.

State vector layout: per-agent (row, col, level) triples, then per-food
(row, col, level) triples. A collected food keeps its coordinates but its
level slot drops to 0 and the cell stops blocking movement.

Shared reward: collecting a food adds ``food_level / total_food_level`` at
episode start, so a fully successful episode returns exactly 1.0.
"""

from __future__ import annotations

import numpy as np

from .core import (A_LOAD, LBF_MOVES, LbfConfig, StepResult, make_spec)


class LbfEnv:
    """Single-threaded environment instance; owns its RNG stream."""

    def __init__(self, config: LbfConfig | None = None):
        self.config = config or LbfConfig()
        self.spec = make_spec(self.config)
        self._rng = np.random.default_rng(self.config.rng_seed)
        self._agents: list[tuple[int, int]] = []
        self._foods: list[tuple[int, int]] = []
        self._food_levels: list[int] = []
        self._t = 0

    # -- state vector ------------------------------------------------------

    def state(self) -> np.ndarray:
        cfg = self.config
        out = np.empty(self.spec.state_dim, dtype=np.float64)
        k = 0
        for (r, c), lv in zip(self._agents, cfg.agent_levels):
            out[k:k + 3] = (r, c, lv)
            k += 3
        for (r, c), lv in zip(self._foods, self._food_levels):
            out[k:k + 3] = (r, c, lv)
            k += 3
        return out

    # -- episode lifecycle -------------------------------------------------

    def reset(self, seed: int | None = None) -> np.ndarray:
        """Place agents anywhere and foods in the interior, all cells distinct.

        Deterministic for a given seed; without a seed the instance RNG
        stream continues (used for auto-resetting rollouts).
        """
        cfg = self.config
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        rng = self._rng
        size = cfg.grid_size

        taken: set[tuple[int, int]] = set()
        foods = []
        while len(foods) < cfg.n_foods:
            cell = (int(rng.integers(1, size - 1)), int(rng.integers(1, size - 1)))
            if cell not in taken:
                taken.add(cell)
                foods.append(cell)
        agents = []
        while len(agents) < cfg.n_agents:
            cell = (int(rng.integers(0, size)), int(rng.integers(0, size)))
            if cell not in taken:
                taken.add(cell)
                agents.append(cell)

        self._agents = agents
        self._foods = foods
        self._food_levels = [cfg.food_level] * cfg.n_foods
        self._t = 0
        return self.state()

    def step(self, action) -> StepResult:
        cfg = self.config
        acts = self.spec.validate_action(action)
        size = cfg.grid_size

        occupied = set(self._agents)
        occupied.update(f for f, lv in zip(self._foods, self._food_levels) if lv > 0)

        # Movement in fixed agent-index order; blocked means stay.
        for i, a in enumerate(acts):
            move = LBF_MOVES.get(a)
            if move is None:
                continue
            r, c = self._agents[i]
            nr, nc = r + move[0], c + move[1]
            if not (0 <= nr < size and 0 <= nc < size):
                continue
            if (nr, nc) in occupied:
                continue
            occupied.discard((r, c))
            occupied.add((nr, nc))
            self._agents[i] = (nr, nc)

        # Loading: a food is collected iff the agents loading adjacent to it
        # jointly reach its level.
        reward = 0.0
        loaders = [i for i, a in enumerate(acts) if a == A_LOAD]
        if loaders:
            total = cfg.total_food_level
            for j, (fr, fc) in enumerate(self._foods):
                lv = self._food_levels[j]
                if lv <= 0:
                    continue
                strength = 0
                for i in loaders:
                    ar, ac = self._agents[i]
                    if abs(ar - fr) + abs(ac - fc) == 1:
                        strength += cfg.agent_levels[i]
                if strength >= lv and strength > 0:
                    reward += lv / total
                    self._food_levels[j] = 0

        self._t += 1
        remaining = sum(1 for lv in self._food_levels if lv > 0)
        done = remaining == 0 or self._t >= cfg.episode_limit
        return StepResult(next_state=self.state(), reward=reward, done=done,
                          info={"foods_remaining": remaining, "t": self._t})
