"""Pearson correlation matrices, their scalar summaries and rolling windows."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import DataError
from .timeseries import ReturnMatrix


def pearson(x, y) -> float:
    """Pearson coefficient of two equal-length samples, clamped to [-1, 1].

    Averages are plain means over the samples (population normalisation).
    Two ``RollingSeries`` are paired by date and must share the same dates.
    """
    if isinstance(x, RollingSeries) and isinstance(y, RollingSeries):
        if x.dates != y.dates:
            raise DataError("rolling series cover different dates")
    if isinstance(x, RollingSeries):
        x = x.as_array()
    if isinstance(y, RollingSeries):
        y = y.as_array()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DataError(f"length mismatch: {x.shape} vs {y.shape}")
    if x.size < 2:
        raise DataError("need at least 2 observations")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DataError("zero variance sample")
    dx = x - x.mean()
    dy = y - y.mean()
    if np.array_equal(dx, dy):
        return 1.0
    if np.array_equal(dx, -dy):
        return -1.0
    vx = np.mean(dx * dx)
    vy = np.mean(dy * dy)
    if vx <= 0 or vy <= 0:
        raise DataError("zero variance sample")
    r = np.mean(dx * dy) / math.sqrt(vx * vy)
    return float(min(1.0, max(-1.0, r)))


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric unit-diagonal matrix of correlation coefficients.

    ``window`` is the half-open column range ``[start, end)`` of the return
    matrix it was estimated on.
    """

    symbols: tuple[str, ...]
    values: np.ndarray
    window: tuple[int, int] = (0, 0)
    window_length: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        v = np.array(self.values, dtype=float)
        n = len(self.symbols)
        if v.shape != (n, n):
            raise DataError(f"matrix shape {v.shape} does not match {n} symbols")
        if not np.all(np.isfinite(v)):
            raise DataError("non-finite correlation")
        iu = np.triu_indices(n, 1)
        if np.any(np.abs(v[iu] - v.T[iu]) > 1e-12):
            raise DataError("correlation matrix is not symmetric")
        if np.any(np.abs(np.diag(v) - 1.0) > 1e-12):
            raise DataError("correlation matrix diagonal must be 1")
        if np.any(np.abs(v[iu]) > 1.0 + 1e-12):
            raise DataError("correlation outside [-1, 1]")
        # mirror the upper triangle so symmetry is exact
        v[iu[1], iu[0]] = v[iu]
        np.fill_diagonal(v, 1.0)
        np.clip(v, -1.0, 1.0, out=v)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "window", tuple(int(w) for w in self.window))
        object.__setattr__(self, "window_length", self.window[1] - self.window[0])

    @property
    def n(self) -> int:
        return len(self.symbols)

    def upper(self) -> np.ndarray:
        """Off-diagonal coefficients C_ij with i < j."""
        return self.values[np.triu_indices(self.n, 1)]

    def permuted(self, order: Sequence[int]) -> "CorrelationMatrix":
        order = list(order)
        return CorrelationMatrix(
            [self.symbols[k] for k in order],
            self.values[np.ix_(order, order)],
            self.window,
        )


def correlation_matrix(returns: ReturnMatrix, window: tuple[int, int] | None = None) -> CorrelationMatrix:
    """Correlation of every pair of series over columns ``[start, end)``."""
    if window is None:
        window = (0, returns.t)
    start, end = window
    if not (0 <= start < end <= returns.t):
        raise DataError(f"window {window} outside 0..{returns.t}")
    if end - start < 2:
        raise DataError("window must span at least 2 observations")
    x = returns.values[:, start:end]
    flat = np.all(x == x[:, :1], axis=1)
    if flat.any():
        sym = returns.symbols[int(np.flatnonzero(flat)[0])]
        raise DataError(f"series {sym!r} is constant on window {window}")
    dx = x - x.mean(axis=1, keepdims=True)
    cov = dx @ dx.T / x.shape[1]
    sd = np.sqrt(np.diag(cov))
    c = cov / np.outer(sd, sd)
    np.clip(c, -1.0, 1.0, out=c)
    # rounding can leave identical series an ulp short of perfect correlation
    for i, j in zip(*np.nonzero(np.triu(np.abs(c) > 1.0 - 1e-12, 1))):
        if np.array_equal(dx[i], dx[j]):
            c[i, j] = 1.0
        elif np.array_equal(dx[i], -dx[j]):
            c[i, j] = -1.0
    iu = np.triu_indices(len(sd), 1)
    c[iu[1], iu[0]] = c[iu]
    np.fill_diagonal(c, 1.0)
    return CorrelationMatrix(returns.symbols, c, (start, end))


def mean_correlation(c: CorrelationMatrix) -> float:
    """Average off-diagonal coefficient."""
    if c.n < 2:
        raise DataError("mean correlation needs at least 2 series")
    u = c.upper()
    return math.fsum(u) / u.size


def correlation_variance(c: CorrelationMatrix) -> float:
    """Population variance of the off-diagonal coefficients."""
    if c.n < 2:
        raise DataError("correlation variance needs at least 2 series")
    u = c.upper()
    m = math.fsum(u) / u.size
    return math.fsum((u - m) ** 2) / u.size


@dataclass(frozen=True)
class RollingSeries:
    """Observable values indexed by window-end date."""

    dates: tuple[str, ...]
    values: tuple[Any, ...]

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.dates) != len(self.values):
            raise DataError("dates and values differ in length")
        for a, b in zip(self.dates, self.dates[1:]):
            if not a < b:
                raise DataError(f"dates not strictly increasing: {a!r} then {b!r}")

    def __len__(self):
        return len(self.dates)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def window_ends(t_len: int, window_length: int, step: int = 1) -> range:
    """Exclusive end indices of rolling windows of ``window_length`` columns."""
    if window_length < 2:
        raise DataError("window length must be at least 2")
    if step < 1:
        raise DataError("step must be at least 1")
    if window_length > t_len:
        raise DataError(f"window exceeds data: {window_length} > {t_len} records")
    return range(window_length, t_len + 1, step)


def rolling_apply(
    returns: ReturnMatrix,
    window_length: int,
    step: int = 1,
    observable: Callable[[CorrelationMatrix], Any] = mean_correlation,
    workers: int | None = None,
) -> RollingSeries:
    """Evaluate ``observable`` on the correlation matrix of every window.

    Window ends run over ``window_length, window_length + step, ..., T``; each
    value is labelled by the date of the last return inside its window.
    ``workers > 1`` evaluates windows on a thread pool; results are collected
    in window order, so output does not depend on scheduling.
    """
    ends = window_ends(returns.t, window_length, step)

    def one(end):
        return observable(correlation_matrix(returns, (end - window_length, end)))

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            values = list(pool.map(one, ends))
    else:
        values = [one(e) for e in ends]
    return RollingSeries([returns.dates[e - 1] for e in ends], values)
