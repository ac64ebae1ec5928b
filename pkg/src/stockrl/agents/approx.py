"""Q-learning with function approximation over continuous price states.

Both agents share one feature encoding: the (h+1) history days' four prices
expressed as relative returns against the window's anchor close, plus the
normalized day index and a constant bias.  The encoding is scale-free, so two
windows that differ only by a price scale produce identical Q-values.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .. import nn
from ..env import ACTIONS, Action, PriceState, RewardConfig, WindowEnv
from ..errors import ConfigError, DataError, NumericalError
from ..market_data import PriceSeries, make_windows
from .base import TradingAgent, check_positive, check_probability, epsilon_schedule


def feature_length(h: int) -> int:
    return 4 * (h + 1) + 2


def featurize(state: PriceState) -> np.ndarray:
    """Scale-free encoding: relative returns, normalized day index, bias 1."""
    returns = state.history / state.anchor - 1.0
    day = state.day_in_window / (state.window_length - 1)
    return np.concatenate([returns.reshape(-1), [day, 1.0]])


LinearWeights = dict[Action, np.ndarray]


def linear_q(weights: LinearWeights, phi: np.ndarray, action: Action) -> float:
    vector = weights[action]
    if vector.shape != phi.shape:
        raise ConfigError(
            f"weight shape {vector.shape} does not match features {phi.shape}"
        )
    return float(vector @ phi)


def linear_update(
    weights: LinearWeights,
    state: PriceState,
    action: Action,
    reward: float,
    next_state: PriceState | None,
    alpha: float,
    gamma: float,
    terminal: bool,
    literal: bool = False,
) -> LinearWeights:
    """TD update on the acted-upon action's weight vector only.

    ``literal=True`` drops the -Q(s,a) correction from the TD error, i.e. the
    uncorrected rule w <- w + alpha*(r + gamma*max Q')*phi; it diverges on any
    persistent nonzero reward stream and exists for comparison runs.
    """
    check_positive("alpha", alpha)
    phi = featurize(state)
    if terminal or next_state is None:
        next_best = 0.0
    else:
        next_phi = featurize(next_state)
        next_best = max(linear_q(weights, next_phi, a) for a in ACTIONS)
    delta = reward + gamma * next_best
    if not literal:
        delta -= linear_q(weights, phi, action)
    if not np.isfinite(delta):
        raise NumericalError(f"non-finite TD error {delta}")
    weights[action] = weights[action] + alpha * delta * phi
    return weights


class LinearQAgent(TradingAgent):
    """Epsilon-greedy linear Q-learning over window episodes: one weight
    vector per action, Q(s,a) = w_a . phi(s)."""

    def __init__(
        self,
        h: int = 2,
        w: int = 5,
        alpha: float = 0.1,
        gamma: float = 0.95,
        epsilon: float = 0.1,
        epsilon_floor: float | None = None,
        epochs: int = 50,
        forced_penalty: float = 1.0,
        literal_update: bool = False,
        seed: int = 0,
    ):
        self.h = h
        self.w = w
        self.alpha = alpha
        self.gamma = gamma
        self.epsilon = epsilon
        self.epsilon_floor = epsilon_floor
        self.epochs = epochs
        self.forced_penalty = forced_penalty
        self.literal_update = literal_update
        self.seed = seed

    def _check_params(self) -> None:
        if self.h < 0:
            raise ConfigError(f"h must be non-negative, got {self.h}")
        if self.w < 2:
            raise ConfigError(f"w must be >= 2, got {self.w}")
        if self.alpha < 0:
            raise ConfigError(f"alpha must be non-negative, got {self.alpha}")
        check_probability("epsilon", self.epsilon)
        if self.epsilon_floor is not None:
            check_probability("epsilon_floor", self.epsilon_floor)
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.forced_penalty < 0:
            raise ConfigError(
                f"forced_penalty must be non-negative, got {self.forced_penalty}"
            )
        if self.epochs < 0:
            raise ConfigError(f"epochs must be non-negative, got {self.epochs}")

    def fit(self, series: PriceSeries) -> "LinearQAgent":
        self._check_params()
        windows = [
            window
            for window in make_windows(series, self.w)
            if window.start_index >= self.h
        ]
        if not windows:
            raise DataError(
                f"no trainable windows: {len(series)} bars, w={self.w}, h={self.h}"
            )
        rng = np.random.default_rng(self.seed)
        config = RewardConfig.window_mode(
            forced_penalty=self.forced_penalty, gamma=self.gamma
        )
        size = feature_length(self.h)
        weights: LinearWeights = {a: np.zeros(size) for a in ACTIONS}
        self.weights_ = weights
        log: list[dict[str, float]] = []
        for epoch in range(self.epochs):
            eps = epsilon_schedule(self.epsilon, self.epsilon_floor, epoch, self.epochs)
            total, count = 0.0, 0
            for window in windows:
                env = WindowEnv(window, series, self.h, config)
                state = env.reset()
                done = False
                while not done:
                    action = self.select_action(state, eps, rng)
                    transition = env.step(action)
                    if self.alpha > 0:  # alpha=0 walks episodes without learning
                        linear_update(
                            weights,
                            state,
                            action,
                            transition.reward,
                            transition.next_state,
                            self.alpha,
                            self.gamma,
                            terminal=transition.done,
                            literal=self.literal_update,
                        )
                    total += transition.reward
                    count += 1
                    state = transition.next_state
                    done = transition.done
            log.append({"epoch": epoch, "avg_reward": total / count, "epsilon": eps})
        self.training_log_ = log
        return self

    def q_values(self, state: PriceState) -> tuple[float, float]:
        self._require_fitted("weights_")
        phi = featurize(state)
        return (
            linear_q(self.weights_, phi, Action.BUY),
            linear_q(self.weights_, phi, Action.WAIT),
        )

    def save(self, path: str | Path) -> None:
        self._require_fitted("weights_")
        save_linear_weights(self.weights_, path)

    def load(self, path: str | Path) -> "LinearQAgent":
        self.weights_ = load_linear_weights(path)
        return self


def save_linear_weights(weights: LinearWeights, path: str | Path) -> None:
    """Flat CSV of ``action,index,value`` rows; exact round-trip."""
    lines = ["action,index,value"]
    for action in ACTIONS:
        for i, value in enumerate(weights[action]):
            lines.append(f"{action.value},{i},{repr(float(value))}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_linear_weights(path: str | Path) -> LinearWeights:
    entries: dict[Action, dict[int, float]] = {a: {} for a in ACTIONS}
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    for line in lines[1:]:
        action, index, value = line.split(",")
        entries[Action(action)][int(index)] = float(value)
    return {
        action: np.array([slots[i] for i in range(len(slots))])
        for action, slots in entries.items()
    }


MlpPair = dict[Action, nn.MlpParams]


def deep_q(networks: MlpPair, phi: np.ndarray, action: Action) -> float:
    output, _ = nn.forward(networks[action], phi)
    return output


def deep_update(
    networks: MlpPair,
    state: PriceState,
    action: Action,
    reward: float,
    next_state: PriceState | None,
    gamma: float,
    lr: float,
    terminal: bool,
) -> float:
    """Semi-gradient step on the squared Bellman error of one action's net.

    The bootstrap target is computed first and frozen as a constant, then one
    SGD step is applied to (Q(s,a) - target)^2; the other action's network is
    left untouched.  Returns the loss before the step.
    """
    phi = featurize(state)
    if terminal or next_state is None:
        target = reward
    else:
        next_phi = featurize(next_state)
        target = reward + gamma * max(deep_q(networks, next_phi, a) for a in ACTIONS)
    if not np.isfinite(target):
        raise NumericalError(f"non-finite Bellman target {target}")
    output, cache = nn.forward(networks[action], phi)
    grads = nn.backward(networks[action], cache, target)
    networks[action] = nn.sgd_step(networks[action], grads, lr)
    return (output - target) ** 2


class DeepQAgent(TradingAgent):
    """Epsilon-greedy deep Q-learning with one small MLP per action."""

    def __init__(
        self,
        h: int = 2,
        w: int = 5,
        hidden_layers: int = 2,
        hidden_units: int = 16,
        learning_rate: float = 1e-3,
        gamma: float = 0.95,
        epsilon: float = 0.1,
        epsilon_floor: float | None = None,
        epochs: int = 30,
        forced_penalty: float = 1.0,
        seed: int = 0,
    ):
        self.h = h
        self.w = w
        self.hidden_layers = hidden_layers
        self.hidden_units = hidden_units
        self.learning_rate = learning_rate
        self.gamma = gamma
        self.epsilon = epsilon
        self.epsilon_floor = epsilon_floor
        self.epochs = epochs
        self.forced_penalty = forced_penalty
        self.seed = seed

    def _check_params(self) -> None:
        if self.h < 0:
            raise ConfigError(f"h must be non-negative, got {self.h}")
        if self.w < 2:
            raise ConfigError(f"w must be >= 2, got {self.w}")
        check_positive("hidden_layers", self.hidden_layers)
        check_positive("hidden_units", self.hidden_units)
        check_positive("learning_rate", self.learning_rate)
        check_probability("epsilon", self.epsilon)
        if self.epsilon_floor is not None:
            check_probability("epsilon_floor", self.epsilon_floor)
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.forced_penalty < 0:
            raise ConfigError(
                f"forced_penalty must be non-negative, got {self.forced_penalty}"
            )
        if self.epochs < 0:
            raise ConfigError(f"epochs must be non-negative, got {self.epochs}")

    def _layer_sizes(self) -> list[int]:
        return [feature_length(self.h)] + [self.hidden_units] * self.hidden_layers + [1]

    def fit(self, series: PriceSeries) -> "DeepQAgent":
        self._check_params()
        windows = [
            window
            for window in make_windows(series, self.w)
            if window.start_index >= self.h
        ]
        if not windows:
            raise DataError(
                f"no trainable windows: {len(series)} bars, w={self.w}, h={self.h}"
            )
        rng = np.random.default_rng(self.seed)
        sizes = self._layer_sizes()
        networks: MlpPair = {a: nn.init_mlp(sizes, rng) for a in ACTIONS}
        self.networks_ = networks
        config = RewardConfig.window_mode(
            forced_penalty=self.forced_penalty, gamma=self.gamma
        )
        log: list[dict[str, float]] = []
        for epoch in range(self.epochs):
            eps = epsilon_schedule(self.epsilon, self.epsilon_floor, epoch, self.epochs)
            total, loss_sum, count = 0.0, 0.0, 0
            for window in windows:
                env = WindowEnv(window, series, self.h, config)
                state = env.reset()
                done = False
                while not done:
                    action = self.select_action(state, eps, rng)
                    transition = env.step(action)
                    loss_sum += deep_update(
                        networks,
                        state,
                        action,
                        transition.reward,
                        transition.next_state,
                        self.gamma,
                        self.learning_rate,
                        terminal=transition.done,
                    )
                    total += transition.reward
                    count += 1
                    state = transition.next_state
                    done = transition.done
            log.append(
                {
                    "epoch": epoch,
                    "avg_reward": total / count,
                    "avg_loss": loss_sum / count,
                    "epsilon": eps,
                }
            )
        self.training_log_ = log
        return self

    def q_values(self, state: PriceState) -> tuple[float, float]:
        self._require_fitted("networks_")
        phi = featurize(state)
        return (
            deep_q(self.networks_, phi, Action.BUY),
            deep_q(self.networks_, phi, Action.WAIT),
        )

    def save(self, path: str | Path) -> None:
        self._require_fitted("networks_")
        save_mlp_pair(self.networks_, path)

    def load(self, path: str | Path) -> "DeepQAgent":
        self.networks_ = load_mlp_pair(path)
        return self


def save_mlp_pair(networks: MlpPair, path: str | Path) -> None:
    """Sectioned text format: per action, the layer sizes then each layer's
    row-major weight matrix and bias vector; exact round-trip."""
    lines: list[str] = []
    for action in ACTIONS:
        params = networks[action]
        lines.append(f"mlp {action.value}")
        lines.append("sizes " + " ".join(str(n) for n in params.sizes))
        for i, (w, b) in enumerate(zip(params.weights, params.biases)):
            lines.append(
                f"W{i} " + " ".join(repr(float(v)) for v in w.reshape(-1))
            )
            lines.append(f"b{i} " + " ".join(repr(float(v)) for v in b))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_mlp_pair(path: str | Path) -> MlpPair:
    networks: MlpPair = {}
    action: Action | None = None
    sizes: list[int] = []
    weights: list[np.ndarray] = []
    biases: list[np.ndarray] = []

    def flush() -> None:
        if action is not None:
            networks[action] = nn.MlpParams(weights=list(weights), biases=list(biases))

    for line in Path(path).read_text(encoding="utf-8").splitlines():
        tag, _, rest = line.partition(" ")
        if tag == "mlp":
            flush()
            action = Action(rest)
            weights, biases = [], []
        elif tag == "sizes":
            sizes = [int(v) for v in rest.split()]
        elif tag.startswith("W"):
            i = int(tag[1:])
            values = np.array([float(v) for v in rest.split()])
            weights.append(values.reshape(sizes[i], sizes[i + 1]))
        elif tag.startswith("b"):
            biases.append(np.array([float(v) for v in rest.split()]))
    flush()
    return networks
