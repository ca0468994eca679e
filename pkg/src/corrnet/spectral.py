"""Eigen-analysis of correlation matrices.

The eigen-solver is a cyclic Jacobi method.  Each sweep visits every
off-diagonal pair exactly once, in round-robin order, so that the N/2
rotations of one round act on disjoint index pairs and can be applied
together as whole-row and whole-column updates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .correlation import CorrelationMatrix
from .errors import DataError, NumericalError

MAX_SWEEPS = 100


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings covering each (p, q), p < q, exactly once over n-1 (or n) rounds."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                pairs.append((min(a, b), max(a, b)))
        pairs.sort()
        p, q = np.array(pairs, dtype=np.intp).reshape(-1, 2).T
        rounds.append((p, q))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigh(a, tol: float | None = None, max_sweeps: int = MAX_SWEEPS):
    """Eigenvalues and eigenvectors of a real symmetric matrix.

    Returns ``(w, v)`` with ``v[:, k]`` the eigenvector of ``w[k]``, unsorted.
    Iterates until the off-diagonal Frobenius norm drops below ``tol``
    (default ``1e-12 * n``).
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DataError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if not np.all(np.isfinite(a)):
        raise DataError("matrix has non-finite entries")
    if tol is None:
        tol = 1e-12 * n
    v = np.eye(n)
    if n < 2:
        return np.diag(a).copy(), v
    rounds = _round_robin(n)
    for _ in range(max_sweeps + 1):
        if _off_norm(a) < tol:
            return np.diag(a).copy(), v
        for p, q in rounds:
            apq = a[p, q]
            live = apq != 0.0
            if not live.any():
                continue
            p, q, apq = p[live], q[live], apq[live]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            big = np.abs(theta) > 1e150
            safe = np.where(big, 0.0, theta)
            t = np.where(
                big,
                0.5 / np.where(big, theta, 1.0),
                np.where(safe >= 0, 1.0, -1.0) / (np.abs(safe) + np.sqrt(safe * safe + 1.0)),
            )
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = (t * c)[:, None]
            c = c[:, None]

            rp, rq = a[p, :], a[q, :]
            a[p, :], a[q, :] = c * rp - s * rq, s * rp + c * rq
            cp, cq = a[:, p].T, a[:, q].T
            a[:, p], a[:, q] = (c * cp - s * cq).T, (s * cp + c * cq).T
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p].T, v[:, q].T
            v[:, p], v[:, q] = (c * vp - s * vq).T, (s * vp + c * vq).T
    raise NumericalError(
        f"Jacobi iteration did not converge in {max_sweeps} sweeps "
        f"(off-diagonal norm {_off_norm(a):.3g}); is the input symmetric?"
    )


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    # rows are eigenvectors; largest-magnitude entry made positive, ties -> lowest index
    lead = np.argmax(np.abs(vecs), axis=1)
    sign = np.sign(vecs[np.arange(len(vecs)), lead])
    sign[sign == 0] = 1.0
    return vecs * sign[:, None]


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs sorted by descending eigenvalue.

    ``eigenvectors[k]`` is the unit eigenvector for ``eigenvalues[k]``.
    """

    symbols: tuple[str, ...]
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.symbols)


def eigendecompose(c: CorrelationMatrix) -> EigenDecomposition:
    w, v = jacobi_eigh(c.values)
    order = np.argsort(-w, kind="stable")
    vecs = _fix_signs(v[:, order].T)
    w = w[order]
    w.setflags(write=False)
    vecs.setflags(write=False)
    return EigenDecomposition(c.symbols, w, vecs)


@dataclass(frozen=True)
class RmtBounds:
    q: float
    lambda_min: float
    lambda_max: float

    def contains(self, x: float) -> bool:
        return self.lambda_min <= x <= self.lambda_max


def rmt_bounds(t_len: int, n: int) -> RmtBounds:
    """Eigenvalue band expected for ``n`` uncorrelated Gaussian series of length ``t_len``.

    With ``Q = T/N`` the band is ``1 + 1/Q -/+ 2*sqrt(1/Q)``.
    """
    if t_len < 1 or n < 1:
        raise DataError("record count and series count must be positive")
    q = t_len / n
    centre = 1.0 + 1.0 / q
    half = 2.0 * math.sqrt(1.0 / q)
    return RmtBounds(q, centre - half, centre + half)


def fraction_outside_rmt(d: EigenDecomposition, b: RmtBounds) -> float:
    """Share of eigenvalues strictly outside ``[lambda_min, lambda_max]``."""
    w = d.eigenvalues
    return float(np.count_nonzero((w < b.lambda_min) | (w > b.lambda_max)) / w.size)


def normalized_largest_eigenvalue(d: EigenDecomposition) -> float:
    return float(d.eigenvalues[0] / math.fsum(d.eigenvalues))


def leading_eigenvector_components(
    d: EigenDecomposition,
    symbols: Sequence[str] | None = None,
    index: int = 0,
) -> dict[str, float]:
    """Components of eigenvector ``index`` (0 = largest eigenvalue) for ``symbols``."""
    if not 0 <= index < d.n:
        raise DataError(f"eigenvector index {index} out of range")
    if symbols is None:
        symbols = d.symbols
    out = {}
    for s in symbols:
        if s not in d.symbols:
            raise DataError(f"unknown symbol {s!r}")
        out[s] = float(d.eigenvectors[index, d.symbols.index(s)])
    return out
