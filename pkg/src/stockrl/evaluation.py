"""Frozen-agent scoring on unseen windows, repeated-run aggregation, Student
confidence intervals, and the result/histogram CSV writers.

Per window, profit is the anchor close minus the purchase close and regret is
the purchase close minus the window's minimum close, so for every policy
``profit + regret`` equals the window's fixed headroom ``anchor - min close``.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from sklearn.base import clone

from .env import RewardConfig, WindowEnv
from .errors import ConfigError, DataError
from .market_data import PriceSeries, SplitSeries, TimeWindow, make_windows
from .stats import student_quantile

AGENT_ORDER = ("Baseline", "Q-Learning", "Approximate Linear", "Deep Q-Learning")


@dataclass(frozen=True)
class WindowScore:
    profit: float  # anchor close minus purchase close
    regret: float  # purchase close minus the window's minimum close
    buy_day: int
    forced: bool


@dataclass(frozen=True)
class RunResult:
    avg_profit: float
    avg_regret: float
    buy_fraction: float  # share of windows with a voluntary purchase


@dataclass(frozen=True)
class EvalReport:
    runs: tuple[RunResult, ...]
    mean_profit: float
    stdev_profit: float
    ci: tuple[float, float] | None
    mean_regret: float
    mean_buy_fraction: float
    histogram_bins: tuple[tuple[float, int], ...]

    @property
    def profits(self) -> np.ndarray:
        return np.array([run.avg_profit for run in self.runs])


def score_window(
    agent, window: TimeWindow, series: PriceSeries, h: int | None = None
) -> WindowScore:
    """Walk one window greedily with frozen parameters and score the purchase.

    Exploration is off and no learning update runs; the forced-purchase
    penalty is excluded so the score is a pure close-price difference.
    """
    if h is None:
        h = agent.h
    env = WindowEnv(window, series, h, RewardConfig.window_mode(forced_penalty=0.0))
    state = env.reset()
    while True:
        day = state.day_in_window
        transition = env.step(agent.act(state))
        if transition.done:
            buy_day = len(window) - 1 if transition.forced else day
            forced = transition.forced
            break
        state = transition.next_state
    closes = window.closes
    price_paid = float(closes[buy_day])
    return WindowScore(
        profit=window.anchor - price_paid,
        regret=price_paid - float(closes.min()),
        buy_day=buy_day,
        forced=forced,
    )


def evaluate(
    agent, windows: Sequence[TimeWindow], series: PriceSeries, h: int | None = None
) -> RunResult:
    """Average window scores; windows lacking enough history are skipped."""
    if h is None:
        h = agent.h
    scoreable = [window for window in windows if window.start_index >= h]
    if not scoreable:
        raise DataError(f"no scoreable windows with h={h}")
    scores = [score_window(agent, window, series, h) for window in scoreable]
    return RunResult(
        avg_profit=float(np.mean([s.profit for s in scores])),
        avg_regret=float(np.mean([s.regret for s in scores])),
        buy_fraction=float(np.mean([not s.forced for s in scores])),
    )


def student_ci(
    mean: float, stdev: float, n: int, level: float = 0.95
) -> tuple[float, float]:
    """Two-sided Student confidence interval for the mean of n samples."""
    if n < 2:
        raise ConfigError(f"need n >= 2 for a confidence interval, got {n}")
    if stdev < 0:
        raise ConfigError(f"stdev must be non-negative, got {stdev}")
    if not 0.0 < level < 1.0:
        raise ConfigError(f"level must be in (0, 1), got {level}")
    half = student_quantile((1.0 + level) / 2.0, n - 1) * stdev / math.sqrt(n)
    return (mean - half, mean + half)


def histogram(values: Sequence[float], n_bins: int) -> list[tuple[float, int]]:
    """Equal-width (lower edge, count) bins spanning [min, max]; the rightmost
    bin includes the maximum, and counts sum to len(values)."""
    if n_bins < 1:
        raise ConfigError(f"n_bins must be >= 1, got {n_bins}")
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ConfigError("cannot histogram an empty sequence")
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        counts = [0] * n_bins
        counts[0] = values.size
        return [(lo, count) for count in counts]
    edges = np.linspace(lo, hi, n_bins + 1)
    idx = np.clip(np.searchsorted(edges, values, side="right") - 1, 0, n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    return [(float(edges[i]), int(counts[i])) for i in range(n_bins)]


def _single_run(agent, train: PriceSeries, test: PriceSeries, w: int, seed: int) -> RunResult:
    candidate = clone(agent)
    if "seed" in candidate.get_params():
        candidate.set_params(seed=seed)
    candidate.fit(train)
    return evaluate(candidate, make_windows(test, w), test)


def repeated_eval(
    agent,
    split: SplitSeries,
    w: int,
    n_runs: int = 51,
    base_seed: int = 0,
    jobs: int = 1,
    n_bins: int = 10,
    level: float = 0.95,
) -> EvalReport:
    """Train a fresh clone per run (seed base_seed+i) on the train split and
    score it on the test split's windows.

    Runs are independent and may fan out over ``jobs`` worker processes; the
    aggregation is ordered by run index, so results do not depend on ``jobs``.
    """
    if n_runs < 1:
        raise ConfigError(f"n_runs must be >= 1, got {n_runs}")
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs}")
    args = [(agent, split.train, split.test, w, base_seed + i) for i in range(n_runs)]
    if jobs == 1 or n_runs == 1:
        runs = [_single_run(*arg) for arg in args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(_single_run, *zip(*args)))
    profits = np.array([run.avg_profit for run in runs])
    if np.all(profits == profits[0]):
        # identical runs have exactly zero spread; do not let float summation
        # manufacture a nonzero stdev for deterministic agents
        mean, stdev = float(profits[0]), 0.0
    else:
        mean = float(profits.mean())
        stdev = float(profits.std(ddof=1)) if n_runs >= 2 else 0.0
    ci = student_ci(mean, stdev, n_runs, level) if n_runs >= 2 else None
    return EvalReport(
        runs=tuple(runs),
        mean_profit=mean,
        stdev_profit=stdev,
        ci=ci,
        mean_regret=float(np.mean([run.avg_regret for run in runs])),
        mean_buy_fraction=float(np.mean([run.buy_fraction for run in runs])),
        histogram_bins=tuple(histogram(profits, n_bins)),
    )


def write_report(
    reports: dict[str, EvalReport], company: str, out_dir: str | Path
) -> tuple[Path, Path]:
    """Write ``results_<company>.csv`` and ``histogram_<company>.csv``.

    Rows follow the fixed agent order (Baseline, Q-Learning, Approximate
    Linear, Deep Q-Learning) for the agents present; floats carry 4 decimals.
    """
    if not reports:
        raise ConfigError("no reports to write")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ordered = [name for name in AGENT_ORDER if name in reports]
    ordered += sorted(name for name in reports if name not in AGENT_ORDER)

    results_path = out_dir / f"results_{company}.csv"
    with results_path.open("w", newline="", encoding="utf-8") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(
            ["agent", "average_profit", "ci_lower", "ci_upper", "profit_stdev"]
        )
        for name in ordered:
            report = reports[name]
            lower = "" if report.ci is None else f"{report.ci[0]:.4f}"
            upper = "" if report.ci is None else f"{report.ci[1]:.4f}"
            writer.writerow(
                [
                    name,
                    f"{report.mean_profit:.4f}",
                    lower,
                    upper,
                    f"{report.stdev_profit:.4f}",
                ]
            )

    histogram_path = out_dir / f"histogram_{company}.csv"
    with histogram_path.open("w", newline="", encoding="utf-8") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["agent", "bin_lower", "count"])
        for name in ordered:
            for edge, count in reports[name].histogram_bins:
                writer.writerow([name, f"{edge:.4f}", count])
    return results_path, histogram_path
