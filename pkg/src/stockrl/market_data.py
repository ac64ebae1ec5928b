"""Daily OHLC price histories: CSV ingestion, validation, splitting, windowing.

The expected CSV layout is the common historical-export format: a header row
``Date,Open,High,Low,Close[,Adj Close][,Volume]`` with ISO dates and decimal
prices, one file per company.  Everything returned here is immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import date
from enum import Enum
from pathlib import Path
from typing import TextIO

import numpy as np

from .errors import ConfigError, DataError, OrderingError, ParseError, ValidationError

DEFAULT_CUTOFF = date(2005, 1, 1)

REQUIRED_COLUMNS = ("Date", "Open", "High", "Low", "Close")
OPTIONAL_COLUMNS = ("Adj Close", "Volume")


class Movement(Enum):
    """Binary daily trend: sign of close minus open.  A flat day counts as UP."""

    DOWN = 0
    UP = 1


@dataclass(frozen=True)
class OhlcBar:
    """One trading day's prices.  Volume and adjusted close are carried but unused."""

    date: date
    open: float
    high: float
    low: float
    close: float
    adj_close: float | None = None
    volume: float | None = None

    def __post_init__(self) -> None:
        for name in ("open", "high", "low", "close"):
            value = getattr(self, name)
            if not value > 0:
                raise ValidationError(f"{self.date}: {name} must be positive, got {value}")
        if self.low > min(self.open, self.close):
            raise ValidationError(f"{self.date}: low {self.low} above open/close")
        if self.high < max(self.open, self.close):
            raise ValidationError(f"{self.date}: high {self.high} below open/close")
        if self.volume is not None and self.volume < 0:
            raise ValidationError(f"{self.date}: negative volume {self.volume}")


def movement(bar: OhlcBar) -> Movement:
    """Direction of the day's trend; close equal to open counts as UP."""
    return Movement.UP if bar.close >= bar.open else Movement.DOWN


@dataclass(frozen=True)
class PriceSeries:
    """Ordered per-company history of daily bars with strictly increasing dates."""

    company: str
    bars: tuple[OhlcBar, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bars", tuple(self.bars))
        for prev, cur in zip(self.bars, self.bars[1:]):
            if cur.date <= prev.date:
                raise OrderingError(
                    f"{self.company}: dates not strictly increasing at {cur.date}"
                )

    def __len__(self) -> int:
        return len(self.bars)

    def __getitem__(self, index: int) -> OhlcBar:
        return self.bars[index]

    @property
    def closes(self) -> np.ndarray:
        return np.array([bar.close for bar in self.bars], dtype=float)

    def movements(self) -> tuple[Movement, ...]:
        return tuple(movement(bar) for bar in self.bars)


@dataclass(frozen=True)
class SplitSeries:
    """Chronological train/validation/test partition of one series."""

    train: PriceSeries
    validation: PriceSeries
    test: PriceSeries


@dataclass(frozen=True)
class TimeWindow:
    """A block of consecutive bars forming one purchase episode.

    ``start_index`` is the offset of the first bar inside the parent series;
    the close of that first bar is the anchor price all profits are measured
    against.
    """

    bars: tuple[OhlcBar, ...]
    start_index: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "bars", tuple(self.bars))
        if len(self.bars) < 2:
            raise ConfigError(f"window needs at least 2 bars, got {len(self.bars)}")

    def __len__(self) -> int:
        return len(self.bars)

    @property
    def closes(self) -> np.ndarray:
        return np.array([bar.close for bar in self.bars], dtype=float)

    @property
    def anchor(self) -> float:
        return self.bars[0].close


def _parse_float(raw: str, row_num: int, column: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ParseError(f"row {row_num}: cannot parse {column}={raw!r}") from None


def _parse_optional_float(raw: str | None, row_num: int, column: str) -> float | None:
    if raw is None or raw.strip() == "":
        return None
    return _parse_float(raw, row_num, column)


def parse_csv(stream: TextIO | str, company: str = "") -> PriceSeries:
    """Parse an OHLC CSV export into a validated :class:`PriceSeries`.

    Raises :class:`ParseError` for malformed rows (wrong column count,
    unparseable numbers or dates), :class:`ValidationError` for price rows
    that break the OHLC invariants, and :class:`OrderingError` when dates go
    backwards.  An empty body (header only) parses to an empty series.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty input: missing header row") from None
    header = [name.strip() for name in header]
    missing = [name for name in REQUIRED_COLUMNS if name not in header]
    if missing:
        raise ParseError(f"header missing required columns: {missing}")
    index = {name: header.index(name) for name in header}

    bars: list[OhlcBar] = []
    prev_date: date | None = None
    for row_num, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(
                f"row {row_num}: expected {len(header)} columns, got {len(row)}"
            )
        raw_date = row[index["Date"]].strip()
        try:
            bar_date = date.fromisoformat(raw_date)
        except ValueError:
            raise ParseError(f"row {row_num}: cannot parse Date={raw_date!r}") from None
        values = {
            name.lower(): _parse_float(row[index[name]], row_num, name)
            for name in ("Open", "High", "Low", "Close")
        }
        adj_close = (
            _parse_optional_float(row[index["Adj Close"]], row_num, "Adj Close")
            if "Adj Close" in index
            else None
        )
        volume = (
            _parse_optional_float(row[index["Volume"]], row_num, "Volume")
            if "Volume" in index
            else None
        )
        try:
            bar = OhlcBar(
                date=bar_date, adj_close=adj_close, volume=volume, **values
            )
        except ValidationError as exc:
            raise ValidationError(f"row {row_num}: {exc}") from None
        if prev_date is not None and bar_date <= prev_date:
            raise OrderingError(
                f"row {row_num}: date {bar_date} not after {prev_date}"
            )
        prev_date = bar_date
        bars.append(bar)
    return PriceSeries(company=company, bars=tuple(bars))


def load_csv(path: str | Path, company: str | None = None) -> PriceSeries:
    """Load one company's history from a CSV file (company defaults to the stem)."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as stream:
        return parse_csv(stream, company=company if company is not None else path.stem)


def to_csv(series: PriceSeries) -> str:
    """Serialize back to CSV text; ``parse_csv`` of the result round-trips exactly."""
    has_adj = any(bar.adj_close is not None for bar in series.bars)
    has_volume = any(bar.volume is not None for bar in series.bars)
    header = list(REQUIRED_COLUMNS)
    if has_adj:
        header.append("Adj Close")
    if has_volume:
        header.append("Volume")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for bar in series.bars:
        row = [bar.date.isoformat()] + [
            repr(float(value)) for value in (bar.open, bar.high, bar.low, bar.close)
        ]
        if has_adj:
            row.append("" if bar.adj_close is None else repr(float(bar.adj_close)))
        if has_volume:
            row.append("" if bar.volume is None else repr(float(bar.volume)))
        writer.writerow(row)
    return out.getvalue()


def write_csv(series: PriceSeries, path: str | Path) -> None:
    Path(path).write_text(to_csv(series), encoding="utf-8")


def filter_from(series: PriceSeries, cutoff: date = DEFAULT_CUTOFF) -> PriceSeries:
    """Keep only bars dated on or after ``cutoff`` (order preserved, may be empty)."""
    kept = tuple(bar for bar in series.bars if bar.date >= cutoff)
    return PriceSeries(company=series.company, bars=kept)


def split_80_10_10(series: PriceSeries) -> SplitSeries:
    """Chronological 80/10/10 partition: train earliest, test latest.

    Sizes are ``floor(0.8n)`` and ``floor(0.1n)`` with the remainder going to
    the test part, so the three slices are disjoint, contiguous, and cover the
    series exactly.
    """
    n = len(series)
    if n < 10:
        raise DataError(f"{series.company}: need at least 10 bars to split, got {n}")
    n_train = int(0.8 * n)
    n_val = int(0.1 * n)
    make = lambda bars: PriceSeries(company=series.company, bars=bars)
    return SplitSeries(
        train=make(series.bars[:n_train]),
        validation=make(series.bars[n_train : n_train + n_val]),
        test=make(series.bars[n_train + n_val :]),
    )


def make_windows(series: PriceSeries, w: int) -> list[TimeWindow]:
    """Tile the series into ``floor(n/w)`` non-overlapping windows of length w.

    Trailing bars that do not fill a final window are dropped rather than
    padded with fabricated prices.
    """
    if w < 2:
        raise ConfigError(f"window length must be >= 2, got {w}")
    count = len(series) // w
    return [
        TimeWindow(bars=series.bars[i * w : (i + 1) * w], start_index=i * w)
        for i in range(count)
    ]
