"""Distances between vertices, computed from their neighbourhood rows.

Two ways to turn a collection into one distance:

* union: sum the adjacency matrices first, then compare the summed rows;
* aware (collection-aware): compare rows inside each graph, then sum the
  per-graph distances.

The Moran-based similarity ``s(u, v) = c_B*B(u, v) + c_W*W(u, v)`` counts
common neighbours (B) and common non-neighbours (W). Placing u and v next
to each other contributes exactly ``2*s`` to Moran's I, so ``1 - s`` is a
path-length surrogate for it.
"""
from __future__ import annotations

import csv
import enum
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, GraphCollection, WeightedUnionGraph, build_union
from .metrics import moran_coefficients

log = logging.getLogger(__name__)


class MetricKind(enum.Enum):
    L2 = "l2"
    L2SQ = "l2sq"
    DELTA_I = "deltai"
    DELTA_I_SQ = "deltaisq"
    UNION_MORAN = "unionmoran"

    @classmethod
    def parse(cls, name) -> "MetricKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "").replace("-", "")
        key = {"deltaisquared": "deltaisq", "l2squared": "l2sq", "l22": "l2sq"}.get(key, key)
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown metric {name!r}; expected one of {[k.value for k in cls]}")


class Approach(enum.Enum):
    UNION = "union"
    AWARE = "aware"

    @classmethod
    def parse(cls, name) -> "Approach":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        key = {"u": "union", "c": "aware", "collection": "aware"}.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown approach {name!r}; expected 'union' or 'aware'") from None


@dataclass(frozen=True)
class DistanceMatrix:
    values: np.ndarray = field(repr=False)
    metric: MetricKind
    approach: Approach
    normalized: bool = False

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# metric={self.metric.value} approach={self.approach.value}"
                  f" normalized={str(self.normalized).lower()} n={self.n}\n")
        w = csv.writer(buf, lineterminator="\n")
        for row in self.values:
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


# -- single graph, single pair -------------------------------------------------

def pair_counts(graph: Graph, u: int, v: int) -> tuple[int, int]:
    """(common neighbours, common non-neighbours) of u and v."""
    a, b = graph.adjacency[u], graph.adjacency[v]
    return int(np.count_nonzero(a & b)), int(np.count_nonzero(~a & ~b))


def similarity_s(graph: Graph, u: int, v: int) -> float:
    c = moran_coefficients(graph.n, graph.m)
    black, white = pair_counts(graph, u, v)
    return c.c_black * black + c.c_white * white


def delta_i(graph: Graph, u: int, v: int) -> float:
    """``1 - s``. Not zero for u == v, but satisfies the triangle inequality on distinct vertices."""
    return 1.0 - similarity_s(graph, u, v)


def l2_neighborhood(graph: Graph, u: int, v: int, squared: bool = False) -> float:
    d2 = int(np.count_nonzero(graph.adjacency[u] != graph.adjacency[v]))
    return float(d2) if squared else float(np.sqrt(d2))


# -- single graph, all pairs -----------------------------------------------------

def pair_count_matrices(adjacency: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All-pairs common-neighbour and common-non-neighbour counts as int64."""
    A = np.asarray(adjacency, dtype=np.float64)
    n = A.shape[0]
    black = A @ A.T
    deg = A.sum(axis=1)
    # |not N(u) and not N(v)| = n - deg(u) - deg(v) + |N(u) & N(v)|
    white = n - deg[:, None] - deg[None, :] + black
    return np.rint(black).astype(np.int64), np.rint(white).astype(np.int64)


def similarity_matrix(graph: Graph) -> np.ndarray:
    c = moran_coefficients(graph.n, graph.m)
    black, white = pair_count_matrices(graph.adjacency)
    return c.c_black * black + c.c_white * white


def delta_i_matrix(graph: Graph) -> np.ndarray:
    return 1.0 - similarity_matrix(graph)


def hamming_matrix(adjacency: np.ndarray) -> np.ndarray:
    A = np.asarray(adjacency, dtype=np.float64)
    deg = A.sum(axis=1)
    return np.rint(deg[:, None] + deg[None, :] - 2 * (A @ A.T)).astype(np.int64)


def graph_distance_matrix(graph: Graph, metric: MetricKind) -> np.ndarray:
    """Per-graph distance matrix for the collection-aware metrics.

    An all-white or all-black graph yields zeros under the Moran metrics:
    every ordering draws it identically, so it has no say in the order.
    """
    metric = MetricKind.parse(metric)
    if metric in (MetricKind.L2, MetricKind.L2SQ):
        h = hamming_matrix(graph.adjacency).astype(np.float64)
        return h if metric is MetricKind.L2SQ else np.sqrt(h)
    if metric in (MetricKind.DELTA_I, MetricKind.DELTA_I_SQ):
        if graph.is_degenerate():
            return np.zeros((graph.n, graph.n))
        d = delta_i_matrix(graph)
        return d * d if metric is MetricKind.DELTA_I_SQ else d
    raise ValueError(f"metric {metric.value!r} is not defined per graph")


# -- union graph ------------------------------------------------------------------

def _union_moran_matrix(union: WeightedUnionGraph, normalized: bool) -> np.ndarray:
    W = union.weights.astype(np.float64)
    n = union.n
    wbar = float(union.mean_weight)
    Z = W - wbar
    cov = Z @ Z.T
    if not normalized:
        return -cov
    total = float((Z * Z).sum())
    if total == 0:
        return np.zeros((n, n))
    # same scaling that turns the 0-1 covariance into c_B*B + c_W*W
    s = (n * cov / total + 1.0) / (2 * (n - 1))
    return 1.0 - s


def union_distance_matrix(union: WeightedUnionGraph, metric: MetricKind,
                          normalized: bool = False) -> np.ndarray:
    """Distances between rows of the union matrix.

    ``UNION_MORAN`` is the negated centred row covariance; it may be negative
    and is only meaningful for comparisons. ``normalized=True`` rescales it
    so that for k = 1 it coincides with the per-graph ``1 - s`` distance.
    """
    metric = MetricKind.parse(metric)
    if metric in (MetricKind.L2, MetricKind.L2SQ):
        W = union.weights.astype(np.float64)
        sq = (W * W).sum(axis=1)
        d2 = np.maximum(np.rint(sq[:, None] + sq[None, :] - 2 * (W @ W.T)), 0.0)
        return d2 if metric is MetricKind.L2SQ else np.sqrt(d2)
    if metric is MetricKind.UNION_MORAN:
        return _union_moran_matrix(union, normalized)
    raise ValueError(f"metric {metric.value!r} is not available for the union approach")


def union_distance(union: WeightedUnionGraph, u: int, v: int, metric: MetricKind,
                   normalized: bool = False) -> float:
    metric = MetricKind.parse(metric)
    wu = union.weights[u].astype(np.float64)
    wv = union.weights[v].astype(np.float64)
    if metric in (MetricKind.L2, MetricKind.L2SQ):
        d2 = float(((wu - wv) ** 2).sum())
        return d2 if metric is MetricKind.L2SQ else float(np.sqrt(d2))
    if metric is MetricKind.UNION_MORAN:
        if normalized:
            return float(_union_moran_matrix(union, True)[u, v])
        wbar = float(union.mean_weight)
        return -float(((wu - wbar) * (wv - wbar)).sum())
    raise ValueError(f"metric {metric.value!r} is not available for the union approach")


# -- collection-aware ------------------------------------------------------------

def collection_distance(collection: GraphCollection, u: int, v: int, metric: MetricKind) -> float:
    """Sum over graphs of the per-graph distance between u and v."""
    metric = MetricKind.parse(metric)
    total = 0.0
    for g in collection:
        if metric in (MetricKind.L2, MetricKind.L2SQ):
            total += l2_neighborhood(g, u, v, squared=metric is MetricKind.L2SQ)
        elif metric in (MetricKind.DELTA_I, MetricKind.DELTA_I_SQ):
            if g.is_degenerate():
                continue
            d = delta_i(g, u, v)
            total += d * d if metric is MetricKind.DELTA_I_SQ else d
        else:
            raise ValueError(f"metric {metric.value!r} is not available for the aware approach")
    return total


def distance_matrix(collection: GraphCollection, approach, metric,
                    normalized: bool = False) -> DistanceMatrix:
    """All-pairs distances (diagonal included) for the given approach and metric."""
    approach = Approach.parse(approach)
    metric = MetricKind.parse(metric)
    if approach is Approach.UNION:
        values = union_distance_matrix(build_union(collection), metric, normalized)
    else:
        n = collection.n
        values = np.zeros((n, n))
        skipped = 0
        for g in collection:
            if metric in (MetricKind.DELTA_I, MetricKind.DELTA_I_SQ) and g.is_degenerate():
                skipped += 1
            values += graph_distance_matrix(g, metric)
        if skipped:
            log.info("%d uniform graph(s) contribute 0 to the %s distance", skipped, metric.value)
    values = (values + values.T) / 2  # exact for already-symmetric input, guards against drift
    values.setflags(write=False)
    return DistanceMatrix(values, metric, approach, normalized)
