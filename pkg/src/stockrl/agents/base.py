"""Shared estimator plumbing for the trading agents.

Agents are sklearn-style estimators: hyperparameters are constructor
arguments, ``fit(series)`` learns from a price series, and fitted state lives
in trailing-underscore attributes so ``sklearn.base.clone`` can produce fresh
unfitted copies for repeated runs.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ..env import ACTIONS, Action
from ..errors import ConfigError


class TradingAgent(BaseEstimator):
    """Base API: fit on a price series, then act greedily on states."""

    def q_values(self, state) -> tuple[float, float]:
        """Return (Q(s, BUY), Q(s, WAIT))."""
        raise NotImplementedError

    def act(self, state) -> Action:
        """Greedy action with a deterministic tie rule (BUY wins ties), so
        scoring a frozen agent is reproducible."""
        q_buy, q_wait = self.q_values(state)
        return Action.BUY if q_buy >= q_wait else Action.WAIT

    def select_action(self, state, epsilon: float, rng: np.random.Generator) -> Action:
        """Epsilon-greedy selection; exact Q ties are broken uniformly by ``rng``."""
        if not 0.0 <= epsilon <= 1.0:
            raise ConfigError(f"epsilon must be in [0, 1], got {epsilon}")
        if epsilon > 0.0 and rng.random() < epsilon:
            return ACTIONS[rng.integers(len(ACTIONS))]
        q_buy, q_wait = self.q_values(state)
        if q_buy == q_wait:
            return ACTIONS[rng.integers(len(ACTIONS))]
        return Action.BUY if q_buy > q_wait else Action.WAIT

    def _require_fitted(self, attribute: str) -> None:
        if not hasattr(self, attribute):
            raise NotFittedError(
                f"{type(self).__name__} is not fitted yet; call fit() first"
            )


def epsilon_schedule(epsilon: float, floor: float | None, epoch: int, epochs: int) -> float:
    """Constant exploration rate, or a linear decay to ``floor`` when given."""
    if floor is None or epochs <= 1:
        return epsilon
    fraction = epoch / (epochs - 1)
    return epsilon + (floor - epsilon) * fraction


def check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"{name} must be in [0, 1], got {value}")


def check_positive(name: str, value: float) -> None:
    if not value > 0:
        raise ConfigError(f"{name} must be positive, got {value}")
