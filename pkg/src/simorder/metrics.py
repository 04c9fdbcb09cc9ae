"""Quality measures for a graph drawn as a matrix under an ordering.

Moran's I is evaluated on the drawn 0-1 matrix with Rook adjacency (cells
sharing a side). Its simplified form only needs the black-black and
white-white adjacency counts, which stay exact integers until the final
multiplication by the two density coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .graph import Graph, GraphCollection, Ordering, WeightedUnionGraph, permute_view


@dataclass(frozen=True)
class AdjacencyCounts:
    """Unordered side-adjacent cell pairs: both black, both white, mixed."""

    black: int
    white: int
    mixed: int

    @property
    def total(self) -> int:
        return self.black + self.white + self.mixed


@dataclass(frozen=True)
class MoranCoefficients:
    c_black: float
    c_white: float


# Two segments per non-loop edge (top-u -> bottom-v and top-v -> bottom-u).
# The two segments of one edge always cross and are not counted; segments
# with a common endpoint never satisfy the strict crossing test. Loops draw
# no segment.
CROSSING_CONFIG = {
    "segments_per_edge": 2,
    "exclude_same_edge": True,
    "exclude_common_endpoint": True,
    "loops": "ignored",
}


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"Moran's I needs n >= 2, got n={n}")


def _cell_counts(M: np.ndarray) -> AdjacencyCounts:
    M = np.asarray(M, dtype=bool)
    h_b = np.count_nonzero(M[:, :-1] & M[:, 1:])
    h_w = np.count_nonzero(~M[:, :-1] & ~M[:, 1:])
    v_b = np.count_nonzero(M[:-1, :] & M[1:, :])
    v_w = np.count_nonzero(~M[:-1, :] & ~M[1:, :])
    rows, cols = M.shape
    total = rows * (cols - 1) + cols * (rows - 1)
    b, w = int(h_b + v_b), int(h_w + v_w)
    return AdjacencyCounts(b, w, total - b - w)


def count_adjacencies(graph: Graph, ordering: Ordering) -> AdjacencyCounts:
    """Count black-black, white-white and mixed Rook adjacencies of the drawn matrix."""
    _check_n(graph.n)
    return _cell_counts(permute_view(graph, ordering))


def moran_coefficients(n: int, m: int) -> MoranCoefficients:
    """Weights of B and W in ``I = c_B*B + c_W*W - 1``.

    Only defined when the matrix holds both colours (0 < m < n^2).
    """
    _check_n(n)
    if not 0 < m < n * n:
        raise ValueError(f"Moran coefficients undefined for m={m}, n={n} (uniform matrix)")
    return MoranCoefficients(n / (2 * (n - 1) * m), n / (2 * (n - 1) * (n * n - m)))


def _moran_from_counts(n: int, m: int, black: int, white: int) -> float:
    if m == 0 or m == n * n:
        return 1.0
    c = moran_coefficients(n, m)
    return c.c_black * black + c.c_white * white - 1.0


def morans_i(graph: Graph, ordering: Ordering) -> float:
    """Moran's I of the matrix drawn under ``ordering``.

    Returns +1 for an all-white or all-black matrix, where the statistic
    itself is undefined.
    """
    counts = count_adjacencies(graph, ordering)
    return _moran_from_counts(graph.n, graph.m, counts.black, counts.white)


def morans_i_two_orderings(graph: Graph, row: Ordering, col: Ordering) -> float:
    """Moran's I with separate row and column orderings."""
    _check_n(graph.n)
    if row.n != graph.n or col.n != graph.n:
        raise ValueError("orderings must cover the graph's vertices")
    M = graph.adjacency[np.ix_(row.order, col.order)]
    counts = _cell_counts(M)
    return _moran_from_counts(graph.n, graph.m, counts.black, counts.white)


def grid_weights(rows: int, cols: int | None = None, queen: bool = False) -> np.ndarray:
    """Binary contiguity weights for a rows x cols grid in row-major order.

    Rook contiguity links cells sharing a side; ``queen=True`` adds corners.
    """
    cols = rows if cols is None else cols
    r = rows * cols
    T = np.zeros((r, r), dtype=np.int8)
    offsets = [(0, 1), (1, 0)]
    if queen:
        offsets += [(1, 1), (1, -1)]
    for i in range(rows):
        for j in range(cols):
            for di, dj in offsets:
                a, b = i + di, j + dj
                if 0 <= a < rows and 0 <= b < cols:
                    p, q = i * cols + j, a * cols + b
                    T[p, q] = T[q, p] = 1
    return T


def morans_i_general(values: Sequence[float], weights: np.ndarray) -> float:
    """Textbook Moran's I for values on r regions with an r x r weight matrix.

    .. math:: I = \\frac{r}{t} \\frac{\\sum_{ab} T_{ab} z_a z_b}{\\sum_a z_a^2},
       \\quad z = x - \\bar{x}

    Raises
    ------
    ValueError
        If the weights sum to zero or all values are equal (zero variance).
    """
    x = np.asarray(values, dtype=np.float64).ravel()
    T = np.asarray(weights, dtype=np.float64)
    r = x.shape[0]
    if T.shape != (r, r):
        raise ValueError(f"weights must be {r}x{r}, got {T.shape}")
    t = T.sum()
    if t <= 0:
        raise ValueError("weights sum to zero")
    z = x - x.mean()
    den = np.dot(z, z)
    if den == 0:
        raise ValueError("zero variance: all values are equal")
    return float(r / t * (z @ T @ z) / den)


# -- ordering-distance measures ---------------------------------------------

def _spans(graph: Graph, ordering: Ordering) -> np.ndarray:
    e = graph.edges()
    r = ordering.rank
    return np.abs(r[e[:, 0]] - r[e[:, 1]])


def bandwidth(graph: Graph, ordering: Ordering) -> int:
    """Largest rank distance of any edge; 0 without edges."""
    s = _spans(graph, ordering)
    return int(s.max()) if s.size else 0


def profile(graph: Graph, ordering: Ordering) -> int:
    """Sum over positions i of the distance to the earliest neighbour before i.

    A vertex with no earlier neighbour contributes 0.
    """
    M = permute_view(graph, ordering)
    n = graph.n
    lower = np.tril(M, k=-1)
    has = lower.any(axis=1)
    first = np.argmax(lower, axis=1)
    return int(np.where(has, np.arange(n) - first, 0).sum())


def linear_arrangement(graph: Graph, ordering: Ordering, double: bool = False) -> int:
    """Sum of rank distances over non-loop edges.

    Each undirected edge counts once unless ``double`` is set, in which
    case both directions of every edge are summed.
    """
    total = int(_spans(graph, ordering).sum())
    return 2 * total if double else total


def normalized_linear_arrangement(values: Sequence[float]) -> list[float]:
    """Map each value a to ``1 - a/M`` with M the largest value (all 1.0 if M == 0)."""
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("need at least one value")
    if any(v < 0 for v in vals):
        raise ValueError("linear arrangement values must be nonnegative")
    top = max(vals)
    if top == 0:
        return [1.0] * len(vals)
    return [1.0 - v / top for v in vals]


# -- two-layer crossings -------------------------------------------------------

def _segment_crossings(weights: np.ndarray, rank: np.ndarray) -> int:
    """Weighted crossings for a symmetric nonnegative integer edge-weight matrix."""
    w = np.triu(np.asarray(weights, dtype=np.int64), k=1)
    u, v = np.nonzero(w)
    if u.size < 2:
        return 0
    ew = w[u, v]
    top = np.concatenate([rank[u], rank[v]])
    bot = np.concatenate([rank[v], rank[u]])
    sw = np.concatenate([ew, ew])
    n = rank.shape[0]
    idx = np.argsort(top * n + bot, kind="stable")
    inv = int(_kernels.weighted_inversions(bot[idx].astype(np.int64), sw[idx], n))
    # the two segments of an edge always cross each other
    return inv - int((ew * ew).sum())


def crossings(graph: Graph, ordering: Ordering) -> int:
    """Number of crossing segment pairs in the two-layer drawing."""
    if ordering.n != graph.n:
        raise ValueError("ordering size does not match graph")
    return _segment_crossings(graph.adjacency, ordering.rank)


def weighted_crossings(union: WeightedUnionGraph, ordering: Ordering) -> int:
    """Crossings of the union graph, each pair weighted by the product of edge weights."""
    if ordering.n != union.n:
        raise ValueError("ordering size does not match graph")
    return _segment_crossings(union.weights, ordering.rank)


def collection_crossings(collection: GraphCollection, ordering: Ordering) -> int:
    """Sum of per-graph crossings."""
    return sum(crossings(g, ordering) for g in collection)


def all_measures(graph: Graph, ordering: Ordering) -> dict:
    """Every single-graph measure, keyed by its CLI name."""
    out = {
        "moran": morans_i(graph, ordering) if graph.n >= 2 else float("nan"),
        "bandwidth": bandwidth(graph, ordering),
        "profile": profile(graph, ordering),
        "la": linear_arrangement(graph, ordering),
        "crossings": crossings(graph, ordering),
    }
    return out
