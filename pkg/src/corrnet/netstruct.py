"""Correlation distances, minimal spanning trees and node observables."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .correlation import CorrelationMatrix, correlation_matrix
from .errors import DataError, NumericalError
from .timeseries import ReturnMatrix


@dataclass(frozen=True)
class DistanceMatrix:
    """Pairwise correlation distances ``sqrt(2 (1 - C_ij))``."""

    symbols: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        v = np.array(self.values, dtype=float)
        n = len(self.symbols)
        if v.shape != (n, n):
            raise DataError(f"matrix shape {v.shape} does not match {n} symbols")
        if np.any(np.diag(v) != 0) or np.any(v != v.T):
            raise DataError("distance matrix must be symmetric with zero diagonal")
        if np.any(v < 0) or np.any(v > 2):
            raise DataError("correlation distance outside [0, 2]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return len(self.symbols)


def distance_matrix(c: CorrelationMatrix) -> DistanceMatrix:
    d = np.sqrt(2.0 * (1.0 - c.values))
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(c.symbols, d)


@dataclass(frozen=True)
class SpanningTree:
    """Weighted tree over ``symbols``; ``edges`` hold ``(i, j, weight)`` with i < j."""

    symbols: tuple[str, ...]
    edges: tuple[tuple[int, int, float], ...]
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        n = len(self.symbols)
        edges = tuple((min(i, j), max(i, j), float(w)) for i, j, w in self.edges)
        object.__setattr__(self, "edges", edges)
        if len(edges) != n - 1:
            raise DataError(f"a tree on {n} nodes has {n - 1} edges, got {len(edges)}")
        adj: list[list[int]] = [[] for _ in range(n)]
        for i, j, _ in edges:
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise DataError(f"bad edge ({i}, {j})")
            adj[i].append(j)
            adj[j].append(i)
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))
        if n and len(self._hops(0)) != n:
            raise DataError("edges do not connect all nodes")

    @property
    def n(self) -> int:
        return len(self.symbols)

    def total_weight(self) -> float:
        return math.fsum(w for _, _, w in self.edges)

    def _hops(self, root: int) -> dict[int, int]:
        level = {root: 0}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in self.adjacency[u]:
                if v not in level:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level

    def hop_distances(self, root: int) -> np.ndarray:
        """Number of links between ``root`` and every node."""
        out = np.zeros(self.n, dtype=int)
        for node, lv in self._hops(root).items():
            out[node] = lv
        return out


def mst_prim(d: DistanceMatrix) -> SpanningTree:
    """Minimal spanning tree by Prim's algorithm, grown from node 0.

    Equal-weight candidate edges are resolved in favour of the smallest
    ``(min endpoint, max endpoint)`` pair, so the result is reproducible.
    """
    n = d.n
    if n < 2:
        raise DataError("spanning tree needs at least 2 nodes")
    w = d.values
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best_w = w[0].copy()
    best_u = np.zeros(n, dtype=int)
    edges = []
    for _ in range(n - 1):
        pick = -1
        pick_key = None
        for v in np.flatnonzero(~in_tree):
            u = best_u[v]
            key = (best_w[v], min(u, v), max(u, v))
            if pick_key is None or key < pick_key:
                pick, pick_key = v, key
        u = int(best_u[pick])
        edges.append((min(u, pick), max(u, pick), float(w[u, pick])))
        in_tree[pick] = True
        for v in np.flatnonzero(~in_tree):
            cand, cur = w[pick, v], best_w[v]
            if cand < cur or (
                cand == cur and (min(pick, v), max(pick, v)) < (min(best_u[v], v), max(best_u[v], v))
            ):
                best_w[v] = cand
                best_u[v] = pick
    return SpanningTree(d.symbols, edges)


def node_strength(d: DistanceMatrix, i: int) -> float:
    """Sum of reciprocal distances from ``i`` to every other node of the full matrix."""
    row = np.delete(d.values[i], i)
    if np.any(row == 0):
        j = next(k for k in range(d.n) if k != i and d.values[i, k] == 0)
        raise NumericalError(
            f"zero distance between {d.symbols[i]!r} and {d.symbols[j]!r}: "
            "perfectly correlated pair has infinite strength"
        )
    return math.fsum(1.0 / row)


def strengths(d: DistanceMatrix) -> np.ndarray:
    return np.array([node_strength(d, i) for i in range(d.n)])


def node_degree(t: SpanningTree, i: int) -> int:
    return len(t.adjacency[i])


def betweenness_count(t: SpanningTree, i: int) -> int:
    """Unordered pairs of other nodes whose tree path passes through ``i``."""
    # pairs split by i: all pairs among the other nodes minus pairs inside one branch
    sizes = []
    seen = {i}
    for start in t.adjacency[i]:
        size = 0
        stack = [start]
        seen.add(start)
        while stack:
            u = stack.pop()
            size += 1
            for v in t.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        sizes.append(size)
    m = t.n - 1
    return m * (m - 1) // 2 - sum(s * (s - 1) // 2 for s in sizes)


def betweenness(t: SpanningTree, i: int) -> float:
    """Betweenness of ``i`` on the unweighted tree, scaled so a star centre scores 1."""
    pairs = (t.n - 1) * (t.n - 2) // 2
    if pairs == 0:
        return 0.0
    return betweenness_count(t, i) / pairs


def mean_occupation_layer(t: SpanningTree) -> tuple[int, float]:
    """Central vertex minimising the mean hop level, and that mean level.

    Ties go to the lowest node index.
    """
    best = None
    for r in range(t.n):
        total = int(t.hop_distances(r).sum())
        if best is None or total < best[1]:
            best = (r, total)
    return best[0], best[1] / t.n


@dataclass(frozen=True)
class StrengthBand:
    low: np.ndarray
    mid: np.ndarray
    high: np.ndarray


def strength_errorbar(returns: ReturnMatrix, window: tuple[int, int], shift: int = 7) -> StrengthBand:
    """Node strengths for ``window`` and for the same window moved ``shift`` records either way."""
    start, end = window
    if shift < 0:
        raise DataError("shift must be non-negative")
    if start - shift < 0 or end + shift > returns.t:
        raise DataError(
            f"insufficient records to shift window {window} by {shift} "
            f"(data has {returns.t} records)"
        )
    rows = [
        strengths(distance_matrix(correlation_matrix(returns, (start + k, end + k))))
        for k in (-shift, 0, shift)
    ]
    stack = np.vstack(rows)
    return StrengthBand(stack.min(axis=0), rows[1], stack.max(axis=0))


@dataclass(frozen=True)
class NodeTable:
    """Per-node degree, strength and betweenness of one analysis window."""

    symbols: tuple[str, ...]
    degree: np.ndarray
    strength: np.ndarray
    betweenness: np.ndarray


def node_table(d: DistanceMatrix, t: SpanningTree) -> NodeTable:
    n = t.n
    return NodeTable(
        t.symbols,
        np.array([node_degree(t, i) for i in range(n)]),
        strengths(d),
        np.array([betweenness(t, i) for i in range(n)]),
    )


def tree_from_symbols(symbols: Sequence[str], edges) -> SpanningTree:
    """Build a tree from ``(symbol, symbol, weight)`` triples."""
    idx = {s: k for k, s in enumerate(symbols)}
    try:
        return SpanningTree(symbols, [(idx[a], idx[b], w) for a, b, w in edges])
    except KeyError as e:
        raise DataError(f"edge names unknown symbol {e.args[0]!r}") from None
