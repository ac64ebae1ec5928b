"""Purchase-timing MDP over daily bars.

Two environments share the action set {BUY, WAIT}:

* :class:`WindowEnv` plays one episode per time window.  Buying on day t with
  close p0 ends the episode with reward ``-(p0 - anchor)``; waiting is free
  until the last day, where the purchase is forced and an optional penalty is
  subtracted.
* :class:`MovementEnv` walks the day stream as one continuing episode.
  Buying earns ``+r`` when the next day's close is higher than today's and
  ``-r`` otherwise; waiting costs ``-c``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError, DataError
from .market_data import Movement, PriceSeries, TimeWindow, movement


class Action(Enum):
    BUY = "buy"
    WAIT = "wait"


ACTIONS = (Action.BUY, Action.WAIT)


class RewardMode(Enum):
    MOVEMENT = "movement"
    WINDOW = "window"


@dataclass(frozen=True)
class RewardConfig:
    """Reward shaping knobs; ``r``/``c`` drive movement mode, ``forced_penalty``
    applies to window-mode forced purchases only."""

    mode: RewardMode
    r: float = 1.0
    c: float = 0.1
    forced_penalty: float = 0.0
    gamma: float = 0.95

    def __post_init__(self) -> None:
        if not self.r > 0:
            raise ConfigError(f"r must be positive, got {self.r}")
        if self.c < 0:
            raise ConfigError(f"c must be non-negative, got {self.c}")
        if self.forced_penalty < 0:
            raise ConfigError(f"forced_penalty must be non-negative, got {self.forced_penalty}")
        if not 0 <= self.gamma <= 1:
            raise ConfigError(f"gamma must be in [0, 1], got {self.gamma}")

    @classmethod
    def movement_mode(cls, r: float = 1.0, c: float = 0.1, gamma: float = 0.95) -> "RewardConfig":
        return cls(mode=RewardMode.MOVEMENT, r=r, c=c, gamma=gamma)

    @classmethod
    def window_mode(cls, forced_penalty: float = 0.0, gamma: float = 0.95) -> "RewardConfig":
        return cls(mode=RewardMode.WINDOW, forced_penalty=forced_penalty, gamma=gamma)


@dataclass(frozen=True)
class MovementState:
    """Trailing daily trends, oldest first: h previous days plus the current day."""

    trends: tuple[Movement, ...]

    @property
    def h(self) -> int:
        return len(self.trends) - 1

    def bits(self) -> str:
        """Encode as a bitstring, UP=1 / DOWN=0, oldest day first."""
        return "".join(str(trend.value) for trend in self.trends)

    @classmethod
    def from_bits(cls, bits: str) -> "MovementState":
        return cls(trends=tuple(Movement(int(ch)) for ch in bits))


@dataclass(frozen=True, eq=False)
class PriceState:
    """Price history seen on one window day.

    ``history`` holds rows ``[open, high, low, close]`` for days -h..0, oldest
    first; the current day is the last row.  ``anchor`` is the close of the
    window's first day.
    """

    history: np.ndarray
    day_in_window: int
    window_length: int
    anchor: float

    def __post_init__(self) -> None:
        self.history.flags.writeable = False

    @property
    def close(self) -> float:
        return float(self.history[-1, 3])

    @property
    def is_last_day(self) -> bool:
        return self.day_in_window == self.window_length - 1

    def to_movement_state(self, h: int | None = None) -> MovementState:
        """Derive the discrete trend state from the last ``h``+1 history rows."""
        rows = self.history if h is None else self.history[-(h + 1):]
        trends = tuple(
            Movement.UP if row[3] >= row[0] else Movement.DOWN for row in rows
        )
        return MovementState(trends=trends)


@dataclass(frozen=True, eq=False)
class Transition:
    """Result of one env step; ``next_state`` is None on terminal transitions."""

    next_state: "PriceState | MovementState | None"
    reward: float
    done: bool
    forced: bool = False


class WindowEnv:
    """One buy/wait episode over a time window, with history drawn from the
    parent series so states may look back across the window's left edge."""

    def __init__(
        self,
        window: TimeWindow,
        series: PriceSeries,
        h: int,
        config: RewardConfig | None = None,
    ) -> None:
        if h < 0:
            raise ConfigError(f"history length must be non-negative, got {h}")
        if config is None:
            config = RewardConfig.window_mode()
        if config.mode is not RewardMode.WINDOW:
            raise ConfigError("WindowEnv needs a window-mode RewardConfig")
        if window.start_index < h:
            raise DataError(
                f"window at index {window.start_index} lacks {h} preceding bars"
            )
        self.window = window
        self.config = config
        self.h = h
        first = window.start_index - h
        last = window.start_index + len(window)
        self._rows = np.array(
            [[bar.open, bar.high, bar.low, bar.close] for bar in series.bars[first:last]],
            dtype=float,
        )
        self._anchor = window.anchor
        self._day: int | None = None

    def _state(self, day: int) -> PriceState:
        return PriceState(
            history=self._rows[day : day + self.h + 1].copy(),
            day_in_window=day,
            window_length=len(self.window),
            anchor=self._anchor,
        )

    def reset(self) -> PriceState:
        self._day = 0
        return self._state(0)

    def step(self, action: Action) -> Transition:
        if self._day is None:
            raise RuntimeError("step() on a terminal or unreset environment")
        day = self._day
        close = float(self._rows[day + self.h, 3])
        last_day = len(self.window) - 1
        if action is Action.BUY:
            self._day = None
            return Transition(None, self._anchor - close, done=True)
        if day < last_day:
            self._day = day + 1
            return Transition(self._state(day + 1), 0.0, done=False)
        # forced purchase on the window's last day
        self._day = None
        reward = self._anchor - close - self.config.forced_penalty
        return Transition(None, reward, done=True, forced=True)


class MovementEnv:
    """Continuing day-by-day episode over a series' movement stream."""

    def __init__(self, series: PriceSeries, h: int, config: RewardConfig | None = None) -> None:
        if h < 0:
            raise ConfigError(f"history length must be non-negative, got {h}")
        if config is None:
            config = RewardConfig.movement_mode()
        if config.mode is not RewardMode.MOVEMENT:
            raise ConfigError("MovementEnv needs a movement-mode RewardConfig")
        if len(series) < h + 2:
            raise DataError(
                f"{series.company or 'series'}: need more than {h + 1} bars for h={h}"
            )
        self.config = config
        self.h = h
        self._closes = series.closes
        self._movements = series.movements()
        self._t: int | None = None

    def _state(self, t: int) -> MovementState:
        return MovementState(trends=self._movements[t - self.h : t + 1])

    def reset(self) -> MovementState:
        self._t = self.h
        return self._state(self.h)

    def step(self, action: Action) -> Transition:
        if self._t is None:
            raise RuntimeError("step() on a terminal or unreset environment")
        t = self._t
        if action is Action.BUY:
            rose = self._closes[t + 1] > self._closes[t]
            reward = self.config.r if rose else -self.config.r
        else:
            reward = -self.config.c
        t_next = t + 1
        if t_next == len(self._closes) - 1:
            self._t = None
            return Transition(None, reward, done=True)
        self._t = t_next
        return Transition(self._state(t_next), reward, done=False)
