"""Submit-and-leave baseline: buy once the price dips a fixed amount below the
window's opening close, or on the last day no matter what."""

from __future__ import annotations

from ..env import Action, PriceState
from ..errors import ConfigError
from ..market_data import PriceSeries
from .base import TradingAgent


class SubmitLeaveBaseline(TradingAgent):
    """Deterministic rule agent with one threshold parameter ``d`` (in currency
    units).  It never learns, so repeated evaluations have zero variance."""

    h = 0  # needs no price history beyond the current day

    def __init__(self, d: float = 0.5):
        self.d = d

    def _check_params(self) -> None:
        if self.d < 0:
            raise ConfigError(f"d must be non-negative, got {self.d}")

    def fit(self, series: PriceSeries | None = None) -> "SubmitLeaveBaseline":
        self._check_params()
        self.fitted_ = True
        return self

    def act(self, state: PriceState) -> Action:
        self._check_params()
        if state.is_last_day:
            return Action.BUY
        if state.close <= state.anchor - self.d:
            return Action.BUY
        return Action.WAIT
