"""Exact Q-learning over discrete movement states.

The state space is tiny by construction (2^(h+1) trend tuples), so Q-values
live in a plain dict keyed by (state, action) with a default of zero for
unseen pairs.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ..env import ACTIONS, Action, MovementEnv, MovementState, PriceState, RewardConfig
from ..errors import ConfigError, DataError
from ..market_data import PriceSeries
from .base import TradingAgent, check_positive, check_probability, epsilon_schedule

QTable = dict[tuple[MovementState, Action], float]


def q_update(
    table: QTable,
    state: MovementState,
    action: Action,
    reward: float,
    next_state: MovementState | None,
    alpha: float,
    gamma: float,
    terminal: bool = False,
) -> QTable:
    """One-step Q-learning update; touches exactly one table entry.

    Q(s,a) <- Q(s,a) + alpha * (reward + gamma * max_a' Q(s',a') - Q(s,a)),
    with the bootstrap term dropped on terminal transitions.
    """
    if not 0.0 < alpha <= 1.0:
        raise ConfigError(f"alpha must be in (0, 1], got {alpha}")
    if terminal or next_state is None:
        next_best = 0.0
    else:
        next_best = max(table.get((next_state, a), 0.0) for a in ACTIONS)
    key = (state, action)
    current = table.get(key, 0.0)
    table[key] = current + alpha * (reward + gamma * next_best - current)
    return table


class TabularQAgent(TradingAgent):
    """Epsilon-greedy Q-learning over the trailing h+1 daily movements.

    Training walks the series as one continuing episode per epoch, rewarding
    buys by whether tomorrow's close beats today's (+r / -r) and waits by a
    small penalty -c.
    """

    def __init__(
        self,
        h: int = 2,
        r: float = 1.0,
        c: float = 0.1,
        gamma: float = 0.95,
        alpha: float = 0.1,
        epsilon: float = 0.1,
        epsilon_floor: float | None = None,
        epochs: int = 50,
        seed: int = 0,
    ):
        self.h = h
        self.r = r
        self.c = c
        self.gamma = gamma
        self.alpha = alpha
        self.epsilon = epsilon
        self.epsilon_floor = epsilon_floor
        self.epochs = epochs
        self.seed = seed

    def _check_params(self) -> None:
        if self.h < 0:
            raise ConfigError(f"h must be non-negative, got {self.h}")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in (0, 1], got {self.alpha}")
        check_probability("epsilon", self.epsilon)
        if self.epsilon_floor is not None:
            check_probability("epsilon_floor", self.epsilon_floor)
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in [0, 1], got {self.gamma}")
        check_positive("r", self.r)
        if self.c < 0:
            raise ConfigError(f"c must be non-negative, got {self.c}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be non-negative, got {self.epochs}")

    def fit(self, series: PriceSeries) -> "TabularQAgent":
        self._check_params()
        if len(series) < self.h + 2:
            raise DataError(
                f"need more than {self.h + 1} bars to train with h={self.h}"
            )
        rng = np.random.default_rng(self.seed)
        config = RewardConfig.movement_mode(r=self.r, c=self.c, gamma=self.gamma)
        env = MovementEnv(series, self.h, config)
        table: QTable = {}
        self.q_table_ = table
        bound = (
            max(self.r, self.c) / (1.0 - self.gamma) if self.gamma < 1.0 else np.inf
        )
        log: list[dict[str, float]] = []
        for epoch in range(self.epochs):
            eps = epsilon_schedule(self.epsilon, self.epsilon_floor, epoch, self.epochs)
            state = env.reset()
            done = False
            total, steps = 0.0, 0
            while not done:
                action = self.select_action(state, eps, rng)
                transition = env.step(action)
                q_update(
                    table,
                    state,
                    action,
                    transition.reward,
                    transition.next_state,
                    self.alpha,
                    self.gamma,
                    terminal=transition.done,
                )
                assert abs(table[(state, action)]) <= bound + 1e-9
                total += transition.reward
                steps += 1
                state = transition.next_state
                done = transition.done
            log.append(
                {"epoch": epoch, "avg_reward": total / steps, "epsilon": eps}
            )
        self.training_log_ = log
        return self

    def _as_movement_state(self, state) -> MovementState:
        if isinstance(state, MovementState):
            return state
        if isinstance(state, PriceState):
            return state.to_movement_state(self.h)
        raise TypeError(f"cannot derive a movement state from {type(state).__name__}")

    def q_values(self, state) -> tuple[float, float]:
        self._require_fitted("q_table_")
        key_state = self._as_movement_state(state)
        return (
            self.q_table_.get((key_state, Action.BUY), 0.0),
            self.q_table_.get((key_state, Action.WAIT), 0.0),
        )

    def save(self, path: str | Path) -> None:
        self._require_fitted("q_table_")
        save_q_table(self.q_table_, path)

    def load(self, path: str | Path) -> "TabularQAgent":
        self.q_table_ = load_q_table(path)
        return self


def save_q_table(table: QTable, path: str | Path) -> None:
    """Write ``state_bits,action,value`` rows; values round-trip exactly."""
    rows = sorted(
        (state.bits(), action.value, repr(float(value)))
        for (state, action), value in table.items()
    )
    with Path(path).open("w", newline="", encoding="utf-8") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["state_bits", "action", "value"])
        writer.writerows(rows)


def load_q_table(path: str | Path) -> QTable:
    table: QTable = {}
    with Path(path).open(newline="", encoding="utf-8") as stream:
        reader = csv.reader(stream)
        next(reader)  # header
        for bits, action, value in reader:
            table[(MovementState.from_bits(bits), Action(action))] = float(value)
    return table
