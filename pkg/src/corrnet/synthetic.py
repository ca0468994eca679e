"""Seeded synthetic return and price generators.

The one-factor model is

    r_i(t) = vol * (beta_i * f(t) + sqrt(1 - beta_i**2) * e_i(t))

with f, e_i independent standard normals, so every series has variance
``vol**2`` and the population correlation of i and j is ``beta_i * beta_j``.
"""

from __future__ import annotations

from typing import Sequence, TextIO

import numpy as np

from .timeseries import PriceTable, ReturnMatrix


def trading_dates(count: int, start: str = "2000-01-03") -> list[str]:
    """``count`` consecutive weekdays as ISO strings."""
    days = np.busday_offset(np.datetime64(start), np.arange(count), roll="forward")
    return [str(d) for d in days]


def one_factor_values(n: int, t: int, loadings, rng: np.random.Generator, vol: float = 0.01) -> np.ndarray:
    beta = np.broadcast_to(np.asarray(loadings, dtype=float), (n,))
    if np.any(np.abs(beta) > 1):
        raise ValueError("loadings must lie in [-1, 1]")
    f = rng.standard_normal(t)
    e = rng.standard_normal((n, t))
    return vol * (beta[:, None] * f[None, :] + np.sqrt(1 - beta**2)[:, None] * e)


def one_factor_returns(
    n: int,
    t: int,
    loadings=0.5,
    seed: int | np.random.Generator = 0,
    vol: float = 0.01,
    symbols: Sequence[str] | None = None,
) -> ReturnMatrix:
    """Returns from the one-factor model; ``loadings=0`` gives independent series."""
    rng = np.random.default_rng(seed)
    values = one_factor_values(n, t, loadings, rng, vol)
    return ReturnMatrix.from_array(values, symbols, trading_dates(t + 1)[1:])


def two_regime_returns(
    n: int,
    t: int,
    loading: float = 0.6,
    seed: int | np.random.Generator = 0,
    vol: float = 0.01,
    symbols: Sequence[str] | None = None,
) -> ReturnMatrix:
    """Independent series for the first ``t // 2`` records, one-factor afterwards."""
    rng = np.random.default_rng(seed)
    half = t // 2
    values = np.hstack(
        [
            one_factor_values(n, half, 0.0, rng, vol),
            one_factor_values(n, t - half, loading, rng, vol),
        ]
    )
    return ReturnMatrix.from_array(values, symbols, trading_dates(t + 1)[1:])


def prices_from_returns(returns: ReturnMatrix, start_price: float = 100.0, first_date: str | None = None) -> PriceTable:
    """Price paths whose log returns are ``returns``."""
    if first_date is None:
        first_date = str(np.busday_offset(np.datetime64(returns.dates[0]), -1, roll="backward"))
    logp = np.log(start_price) + np.concatenate(
        [np.zeros((returns.n, 1)), np.cumsum(returns.values, axis=1)], axis=1
    )
    return PriceTable(returns.symbols, [first_date, *returns.dates], np.exp(logp).T)


def write_price_file(prices: PriceTable, stream: TextIO) -> None:
    """Serialise a table in the ``date,symbol,close`` format; gaps become empty fields."""
    stream.write("date,symbol,close\n")
    for k, date in enumerate(prices.dates):
        for j, sym in enumerate(prices.symbols):
            p = prices.prices[k, j]
            stream.write(f"{date},{sym},{'' if np.isnan(p) else repr(float(p))}\n")
