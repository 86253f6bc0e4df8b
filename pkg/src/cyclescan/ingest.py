"""Daily closure-price ingestion and log-return construction.

Input files follow the trading-day calendar: weekends and holidays are
simply absent, and the series is treated as contiguous in trading-day
index (no imputation).
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptySeries, NonPositivePrice, ParseError, SeriesTooShort

__all__ = ["PriceSeries", "ReturnSeries", "load_prices", "log_returns"]


@dataclass(frozen=True)
class PriceSeries:
    """Dated closure prices S(t) of one market, trading days only."""

    market_id: str
    dates: tuple[dt.date, ...]
    values: np.ndarray  # strictly positive closure prices, local currency

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if len(self.dates) != len(self.values):
            raise ValueError("dates and values must have equal length")
        if np.any(self.values <= 0) or not np.all(np.isfinite(self.values)):
            raise NonPositivePrice(f"{self.market_id}: prices must be positive and finite")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ParseError(f"{self.market_id}: dates must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ReturnSeries:
    """Log returns R(t) = ln(S(t+lag)/S(t)) over a lag of whole trading days."""

    market_id: str
    values: np.ndarray
    lag: int = 1
    dates: tuple[dt.date, ...] = field(default=(), repr=False)  # date of t, when known

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"{self.market_id}: returns must be finite")
        if self.lag < 1:
            raise ValueError("lag must be >= 1 trading day")

    @property
    def n(self) -> int:
        return len(self.values)


def load_prices(path: str | Path, market_id: str) -> PriceSeries:
    """Read a `date,close` CSV (ISO-8601 dates) into a PriceSeries.

    Rows are sorted by date. A duplicated date, a malformed row, or an
    unparseable field raises ParseError naming the offending row; a
    non-positive price raises NonPositivePrice; fewer than two valid
    rows raises EmptySeries.
    """
    path = Path(path)
    rows: list[tuple[dt.date, float]] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header[:2]] != ["date", "close"]:
            raise ParseError(f"{path}: expected header 'date,close', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2 or not row[0].strip() or not row[1].strip():
                raise ParseError(f"{path}:{lineno}: malformed row {row!r}")
            try:
                date = dt.date.fromisoformat(row[0].strip())
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad date {row[0]!r}") from exc
            try:
                close = float(row[1])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad price {row[1]!r}") from exc
            if math.isnan(close):
                raise ParseError(f"{path}:{lineno}: missing price")
            if close <= 0:
                raise NonPositivePrice(f"{path}:{lineno}: non-positive price {close}")
            rows.append((date, close))
    if len(rows) < 2:
        raise EmptySeries(f"{path}: need at least 2 valid rows, found {len(rows)}")
    rows.sort(key=lambda r: r[0])
    for (d1, _), (d2, _) in zip(rows, rows[1:]):
        if d1 == d2:
            raise ParseError(f"{path}: duplicate date {d1.isoformat()}")
    dates = tuple(r[0] for r in rows)
    values = np.array([r[1] for r in rows])
    return PriceSeries(market_id=market_id, dates=dates, values=values)


def log_returns(prices: PriceSeries, lag: int = 1) -> ReturnSeries:
    """Natural-log returns at the given trading-day lag.

    values[t] = ln(S(t+lag) / S(t)) for t = 0 .. N-lag-1. The returns
    telescope: their sum equals ln(S_last / S_first).
    """
    if lag < 1:
        raise ValueError("lag must be >= 1 trading day")
    if prices.n <= lag:
        raise SeriesTooShort(
            f"{prices.market_id}: N={prices.n} does not exceed lag={lag}"
        )
    logp = np.log(prices.values)
    values = logp[lag:] - logp[:-lag]
    return ReturnSeries(
        market_id=prices.market_id,
        values=values,
        lag=lag,
        dates=prices.dates[: prices.n - lag],
    )
