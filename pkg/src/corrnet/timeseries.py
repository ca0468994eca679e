"""Price-file ingestion, common-date alignment and log returns.

Price files are UTF-8 CSV with a mandatory ``date,symbol,close`` header,
one quote per line.  Lines starting with ``#`` and blank lines are skipped.
An empty ``close`` field marks a gap (the symbol did not trade that day).
"""

from __future__ import annotations

import datetime as _dt
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import DataError

HEADER = ("date", "symbol", "close")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_increasing(dates: Sequence[str]) -> None:
    for a, b in zip(dates, dates[1:]):
        if not a < b:
            raise DataError(f"dates not strictly increasing: {a!r} then {b!r}")


@dataclass(frozen=True)
class PriceTable:
    """Closing prices on a date x symbol grid.

    ``prices[k, j]`` is the close of ``symbols[j]`` on ``dates[k]``; NaN marks
    a gap.
    """

    symbols: tuple[str, ...]
    dates: tuple[str, ...]
    prices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "prices", _frozen(self.prices))
        p = self.prices
        if p.shape != (len(self.dates), len(self.symbols)):
            raise DataError(
                f"price grid shape {p.shape} does not match "
                f"{len(self.dates)} dates x {len(self.symbols)} symbols"
            )
        if len(set(self.symbols)) != len(self.symbols):
            raise DataError("duplicate symbols")
        _check_increasing(self.dates)
        quoted = ~np.isnan(p)
        if np.any(p[quoted] <= 0) or not np.all(np.isfinite(p[quoted])):
            raise DataError("prices must be finite and strictly positive")
        for j, sym in enumerate(self.symbols):
            if quoted[:, j].sum() < 2:
                raise DataError(f"symbol {sym!r} has fewer than 2 quotes")

    def column(self, symbol: str) -> np.ndarray:
        return self.prices[:, self.symbols.index(symbol)]

    def has_gaps(self) -> bool:
        return bool(np.isnan(self.prices).any())

    def restrict_dates(self, start: str | None = None, end: str | None = None) -> "PriceTable":
        """Keep dates within ``[start, end]`` (inclusive, lexicographic on ISO dates)."""
        keep = [
            k
            for k, d in enumerate(self.dates)
            if (start is None or d >= start) and (end is None or d <= end)
        ]
        return PriceTable(self.symbols, [self.dates[k] for k in keep], self.prices[keep])


@dataclass(frozen=True)
class ReturnMatrix:
    """Log returns, ``values[i, t]`` for series i over aligned step t.

    ``dates[t]`` labels the *end* of step t, i.e. the price date on which
    the return is realised.
    """

    symbols: tuple[str, ...]
    dates: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", _frozen(self.values))
        v = self.values
        if v.ndim != 2 or v.shape != (len(self.symbols), len(self.dates)):
            raise DataError(
                f"return matrix shape {v.shape} does not match "
                f"{len(self.symbols)} symbols x {len(self.dates)} dates"
            )
        if v.shape[1] < 1:
            raise DataError("need at least 1 return observation")
        if not np.all(np.isfinite(v)):
            raise DataError("non-finite return value")
        _check_increasing(self.dates)

    @classmethod
    def from_array(cls, values, symbols=None, dates=None) -> "ReturnMatrix":
        """Wrap a raw N x T array, inventing labels where none are given."""
        values = np.asarray(values, dtype=float)
        n, t = values.shape
        if symbols is None:
            width = len(str(n - 1))
            symbols = [f"S{i:0{width}d}" for i in range(n)]
        if dates is None:
            width = len(str(t - 1))
            dates = [f"t{k:0{width}d}" for k in range(t)]
        return cls(symbols, dates, values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def t(self) -> int:
        return self.values.shape[1]

    def take(self, symbols: Sequence[str]) -> "ReturnMatrix":
        idx = [self.symbols.index(s) for s in symbols]
        return ReturnMatrix(symbols, self.dates, self.values[idx])


def _parse_close(text: str, lineno: int) -> float:
    text = text.strip()
    if not text:
        return math.nan
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"line {lineno}: close {text!r} is not a number") from None
    if not math.isfinite(value):
        raise DataError(f"line {lineno}: close {text!r} is not finite")
    if value <= 0:
        raise DataError(f"line {lineno}: non-positive price {text!r}")
    return value


def parse_prices(stream: TextIO | Iterable[str]) -> PriceTable:
    """Read a price file into a :class:`PriceTable`.

    Raises :class:`DataError` naming the offending line on malformed rows,
    non-positive prices or a repeated (date, symbol) pair.
    """
    seen_header = False
    quotes: dict[tuple[str, str], float] = {}
    symbol_order: dict[str, None] = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if not seen_header:
            if tuple(f.lower() for f in fields) != HEADER:
                raise DataError(f"line {lineno}: expected header 'date,symbol,close'")
            seen_header = True
            continue
        if len(fields) != 3:
            raise DataError(f"line {lineno}: expected 3 fields, got {len(fields)}")
        date, symbol, close = fields
        try:
            _dt.date.fromisoformat(date)
        except ValueError:
            raise DataError(f"line {lineno}: bad date {date!r}") from None
        if len(date) != 10:
            raise DataError(f"line {lineno}: bad date {date!r}")
        if not symbol:
            raise DataError(f"line {lineno}: empty symbol")
        if (date, symbol) in quotes:
            raise DataError(f"line {lineno}: duplicate quote for {symbol} on {date}")
        quotes[(date, symbol)] = _parse_close(close, lineno)
        symbol_order.setdefault(symbol, None)
    if not seen_header:
        raise DataError("missing header line 'date,symbol,close'")

    dates = sorted({d for d, _ in quotes})
    symbols = list(symbol_order)
    row = {d: k for k, d in enumerate(dates)}
    col = {s: j for j, s in enumerate(symbols)}
    grid = np.full((len(dates), len(symbols)), np.nan)
    for (d, s), p in quotes.items():
        grid[row[d], col[s]] = p
    return PriceTable(symbols, dates, grid)


def align_common_dates(prices: PriceTable, symbols: Sequence[str] | None = None) -> PriceTable:
    """Restrict to ``symbols`` and to the dates on which all of them traded."""
    if symbols is None:
        symbols = prices.symbols
    symbols = list(symbols)
    if not symbols:
        raise DataError("no symbols selected")
    missing = [s for s in symbols if s not in prices.symbols]
    if missing:
        raise DataError(f"unknown symbols: {', '.join(missing)}")
    cols = [prices.symbols.index(s) for s in symbols]
    sub = prices.prices[:, cols]
    keep = np.flatnonzero(~np.isnan(sub).any(axis=1))
    if keep.size == 0:
        raise DataError("selected symbols share no common trading dates")
    if keep.size < 2:
        raise DataError("selected symbols share only one trading date")
    return PriceTable(symbols, [prices.dates[k] for k in keep], sub[keep])


def log_returns(prices: PriceTable) -> ReturnMatrix:
    """Natural-log returns between consecutive dates of a gap-free table."""
    p = prices.prices
    if len(prices.dates) < 2:
        raise DataError("need at least 2 dates for returns")
    if np.isnan(p).any():
        k, j = np.argwhere(np.isnan(p))[0]
        raise DataError(
            f"gap for {prices.symbols[j]} on {prices.dates[k]}; align dates first"
        )
    logp = np.log(p.T)
    return ReturnMatrix(prices.symbols, prices.dates[1:], np.diff(logp, axis=1))
