"""Shared synthetic fixtures: deterministic price generators used across tests."""

from __future__ import annotations

from datetime import date, timedelta

import numpy as np

from stockrl import OhlcBar, PriceSeries


def bars_from_closes(closes, opens=None, start=date(2005, 1, 3), pad=0.4):
    """Build valid bars from a close path; opens default to the previous close."""
    bars = []
    day = start
    for i, close in enumerate(closes):
        if opens is not None:
            op = opens[i]
        elif i == 0:
            op = close
        else:
            op = closes[i - 1]
        bars.append(
            OhlcBar(
                date=day,
                open=float(op),
                high=float(max(op, close) + pad),
                low=float(max(min(op, close) - pad, 0.01)),
                close=float(close),
            )
        )
        day += timedelta(days=1)
    return tuple(bars)


def random_walk_series(
    n: int = 300, seed: int = 0, start_price: float = 100.0, company: str = "Walk"
) -> PriceSeries:
    """Gap-free geometric random walk with ~1% daily moves."""
    rng = np.random.default_rng(seed)
    closes = [start_price]
    for _ in range(n - 1):
        closes.append(max(1.0, closes[-1] * (1.0 + rng.normal(0.0, 0.01))))
    return PriceSeries(company=company, bars=bars_from_closes(closes))


def vee_series(
    n_periods: int = 60, w: int = 5, company: str = "Vee", base: float = 100.0
) -> PriceSeries:
    """Deterministic periodic series: every w-day block falls to a unique
    minimum on day 2 and recovers, with slight amplitude variation per block.

    Day-over-day movement signs per block are (down, down, down, up, up) for
    every block, so trailing-trend states identify the block position exactly.
    """
    assert w == 5, "shape below is laid out for 5-day periods"
    shape = np.array([0.0, -1.0, -2.0, -1.0, 0.5])
    closes = []
    for i in range(n_periods):
        amp = 2.0 + 0.2 * ((i * 7) % 3)
        closes.extend(base + amp * shape)
    opens = [base + 1.0] + closes[:-1]  # first open mimics a preceding recovery day
    return PriceSeries(company=company, bars=bars_from_closes(closes, opens=opens))


def iid_movement_series(n: int = 500, seed: int = 0, company: str = "Coin") -> PriceSeries:
    """Series whose daily movements are independent fair coin flips, so no
    feature of past prices carries information about tomorrow's movement."""
    rng = np.random.default_rng(seed)
    closes, opens = [], []
    close = 100.0
    for _ in range(n):
        op = close
        sign = 1.0 if rng.random() < 0.5 else -1.0
        close = op * (1.0 + sign * rng.uniform(0.002, 0.02))
        opens.append(op)
        closes.append(close)
    return PriceSeries(company=company, bars=bars_from_closes(closes, opens=opens))


def alternating_series(n_days: int = 50, company: str = "Alt") -> PriceSeries:
    """Closes alternating 10, 12, 10, 12, ...: movements flip every day and the
    optimal movement-mode policy is to buy on low days only."""
    closes = [10.0 if i % 2 == 0 else 12.0 for i in range(n_days)]
    opens = [10.5] + closes[:-1]  # first day opens high so every low day trends down
    return PriceSeries(company=company, bars=bars_from_closes(closes, opens=opens))
