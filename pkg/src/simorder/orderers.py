"""Simultaneous ordering algorithms.

* leaf order: distance matrix -> complete-linkage tree -> optimal leaf order;
* barycenter: median-rank sorting followed by crossing-reducing swaps;
* NN + 2-OPT: nearest-neighbour path under ``1 - s`` refined by segment
  reversals while Moran's I improves by more than a threshold.

Algorithm names follow ``<U|C>-<LO|BC>[-<metric>]``, e.g. ``C-LO-deltai``.
"""
from __future__ import annotations

import logging
import os
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .distances import Approach, DistanceMatrix, MetricKind, distance_matrix, similarity_matrix
from .graph import Graph, GraphCollection, Ordering, build_union
from .metrics import collection_crossings, moran_coefficients, morans_i, weighted_crossings

log = logging.getLogger(__name__)

ALGORITHMS = ("leaf_order", "barycenter", "nn2opt")
_ALGO_ALIASES = {"lo": "leaf_order", "leaf": "leaf_order", "leaf_order": "leaf_order",
                 "bc": "barycenter", "bary": "barycenter", "barycenter": "barycenter",
                 "nn2opt": "nn2opt", "nn-2opt": "nn2opt", "nn_2opt": "nn2opt"}

DEBUG = os.environ.get("SIMORDER_DEBUG", "").strip().lower() not in ("", "0", "false", "no")


class InvariantError(RuntimeError):
    """An internal consistency check failed."""


@dataclass(frozen=True)
class OrdererConfig:
    approach: str = "aware"
    algorithm: str = "leaf_order"
    metric: str = "l2"
    seed: int = 0
    barycenter_fixed_iters: int = 10
    barycenter_max_iters: int = 100
    two_opt_threshold: float = 1e-4
    nn_start: Optional[int] = 0
    nn_best_of_all: bool = False
    initial_ordering: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "approach", Approach.parse(self.approach).value)
        algo = _ALGO_ALIASES.get(str(self.algorithm).lower())
        if algo is None:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        object.__setattr__(self, "algorithm", algo)
        object.__setattr__(self, "metric", MetricKind.parse(self.metric).value)
        if self.two_opt_threshold <= 0:
            raise ValueError("two_opt_threshold must be positive")
        if self.barycenter_fixed_iters < 1 or self.barycenter_max_iters < 1:
            raise ValueError("iteration caps must be >= 1")
        if self.initial_ordering is not None:
            object.__setattr__(self, "initial_ordering", tuple(int(x) for x in self.initial_ordering))

    @property
    def name(self) -> str:
        if self.algorithm == "nn2opt":
            return "NN-2OPT"
        prefix = "U" if self.approach == "union" else "C"
        if self.algorithm == "barycenter":
            return f"{prefix}-BC"
        return f"{prefix}-LO-{self.metric}"

    @classmethod
    def from_name(cls, name: str, **kwargs) -> "OrdererConfig":
        """Parse ``U-LO-L2``, ``C-LO-deltai``, ``U-BC``, ``NN-2OPT`` and friends."""
        parts = name.strip().split("-")
        if name.strip().lower().replace("-", "").replace("_", "") == "nn2opt":
            return cls(algorithm="nn2opt", **kwargs)
        if len(parts) < 2:
            raise ValueError(f"cannot parse algorithm name {name!r}")
        approach = Approach.parse(parts[0])
        algo = parts[1].lower()
        metric = parts[2] if len(parts) > 2 else "l2"
        return cls(approach=approach.value, algorithm=algo, metric=metric, **kwargs)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["name"] = self.name
        if d["initial_ordering"] is not None:
            d["initial_ordering"] = list(d["initial_ordering"])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "OrdererConfig":
        d = {k: v for k, v in d.items() if k != "name"}
        return cls(**d)


@dataclass
class OrderingResult:
    ordering: Ordering
    trace: list = field(default_factory=list)   # (iteration, objective) pairs
    config: Optional[OrdererConfig] = None
    wall_time: float = 0.0
    info: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "ordering": self.ordering.tolist(),
            "trace": [[int(i), float(v)] for i, v in self.trace],
            "config": self.config.to_dict() if self.config else None,
            "wall_time": self.wall_time,
            "info": self.info,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OrderingResult":
        cfg = d.get("config")
        return cls(
            ordering=Ordering(d["ordering"]),
            trace=[(int(i), float(v)) for i, v in d.get("trace", [])],
            config=OrdererConfig.from_dict(cfg) if cfg else None,
            wall_time=float(d.get("wall_time", 0.0)),
            info=dict(d.get("info", {})),
        )


def _check_ordering(order, n: int) -> Ordering:
    try:
        o = Ordering(order)
    except ValueError as exc:
        raise InvariantError(f"algorithm produced an invalid permutation: {exc}") from exc
    if o.n != n:
        raise InvariantError(f"algorithm produced {o.n} positions for {n} vertices")
    return o


# -- hierarchical clustering ---------------------------------------------------------

@dataclass(frozen=True)
class ClusterTree:
    """Binary merge tree in scipy numbering.

    Leaves are 0..n-1; merge t joins ``merges[t, 0]`` and ``merges[t, 1]``
    into node n+t at ``heights[t]``. The root is node 2n-2.
    """

    n: int
    merges: np.ndarray = field(repr=False)
    heights: np.ndarray = field(repr=False)

    @property
    def root(self) -> int:
        return 2 * self.n - 2

    def children(self, node: int) -> tuple[int, int]:
        if node < self.n:
            raise ValueError(f"node {node} is a leaf")
        a, b = self.merges[node - self.n]
        return int(a), int(b)

    def leaves(self, node: Optional[int] = None) -> list[int]:
        """Leaves under ``node`` in the tree's stored left-to-right orientation."""
        node = self.root if node is None else node
        out, stack = [], [node]
        while stack:
            v = stack.pop()
            if v < self.n:
                out.append(v)
            else:
                a, b = self.children(v)
                stack.extend((b, a))
        return out

    def adheres(self, ordering) -> bool:
        """True if the sequence is reachable from the tree by swapping children."""
        order = list(ordering.order if isinstance(ordering, Ordering) else ordering)
        if sorted(order) != list(range(self.n)):
            return False
        pos = {v: i for i, v in enumerate(order)}

        def span(v):
            # leaf positions of v must form one contiguous block
            if v < self.n:
                return pos[v], pos[v]
            a, b = self.children(v)
            sa, sb = span(a), span(b)
            if sa is None or sb is None:
                return None
            if sa[1] + 1 == sb[0]:
                return sa[0], sb[1]
            if sb[1] + 1 == sa[0]:
                return sb[0], sa[1]
            return None

        return self.n <= 1 or span(self.root) is not None


def complete_linkage(dist) -> ClusterTree:
    """Agglomerative clustering merging the pair with the smallest maximum distance.

    Ties go to the lexicographically smallest (min id of cluster A, min id
    of cluster B). The diagonal of ``dist`` is ignored.
    """
    values = dist.values if isinstance(dist, DistanceMatrix) else np.asarray(dist, dtype=np.float64)
    values = np.ascontiguousarray(values, dtype=np.float64)
    n = values.shape[0]
    if n < 1:
        raise ValueError("cannot cluster an empty vertex set")
    merges, heights = _kernels.complete_linkage(values)
    return ClusterTree(n, np.asarray(merges), np.asarray(heights))


def path_cost(order, dist) -> float:
    values = dist.values if isinstance(dist, DistanceMatrix) else np.asarray(dist)
    o = np.asarray(order.order if isinstance(order, Ordering) else order)
    return float(values[o[:-1], o[1:]].sum())


def optimal_leaf_order(tree: ClusterTree, dist) -> Ordering:
    """Tree-adherent ordering with the smallest sum of consecutive distances.

    Among optimal orderings the one starting with the smallest vertex id is
    returned (then the smallest final vertex).
    """
    values = dist.values if isinstance(dist, DistanceMatrix) else np.asarray(dist, dtype=np.float64)
    values = np.ascontiguousarray(values, dtype=np.float64)
    if values.shape != (tree.n, tree.n):
        raise ValueError(f"distance matrix is {values.shape}, tree has {tree.n} leaves")
    order = _kernels.olo(np.ascontiguousarray(tree.merges, dtype=np.int64), values)
    return _check_ordering(order, tree.n)


# -- algorithms -------------------------------------------------------------------

def _resolve_metric(config: OrdererConfig) -> tuple[MetricKind, bool, bool]:
    """(metric, normalized, square) used to build the distance matrix."""
    metric = MetricKind.parse(config.metric)
    if config.approach == "union":
        if metric is MetricKind.DELTA_I:
            return MetricKind.UNION_MORAN, False, False
        if metric is MetricKind.DELTA_I_SQ:
            # the raw covariance can be negative, so square the rescaled form
            return MetricKind.UNION_MORAN, True, True
    return metric, False, False


def leaf_order(collection: GraphCollection, config: OrdererConfig) -> OrderingResult:
    t0 = time.perf_counter()
    metric, normalized, square = _resolve_metric(config)
    dm = distance_matrix(collection, config.approach, metric, normalized=normalized)
    if square:
        v = dm.values * dm.values
        dm = DistanceMatrix(v, dm.metric, dm.approach, dm.normalized)
    tree = complete_linkage(dm)
    ordering = optimal_leaf_order(tree, dm)
    cost = path_cost(ordering, dm)
    return OrderingResult(ordering, [(0, cost)], config, time.perf_counter() - t0,
                          {"objective": "path_distance", "distance_metric": dm.metric.value,
                           "normalized": dm.normalized, "squared": square})


def _crossing_objective(collection: GraphCollection, approach: str):
    if approach == "union":
        union = build_union(collection)
        return lambda o: weighted_crossings(union, o)
    return lambda o: collection_crossings(collection, o)


def barycenter(collection: GraphCollection, config: OrdererConfig) -> OrderingResult:
    """Median-rank barycenter ordering followed by adjacent-swap refinement.

    Union mode sorts by the median neighbour rank in the union's support
    graph and scores with weighted crossings. Aware mode sorts by the median
    over graphs of per-graph median neighbour ranks and scores with the sum
    of per-graph crossings.
    """
    t0 = time.perf_counter()
    n = collection.n
    objective = _crossing_objective(collection, config.approach)
    if config.approach == "union":
        stack = (build_union(collection).weights > 0)[None]
    else:
        stack = collection.stack()
    stack = np.ascontiguousarray(stack, dtype=np.bool_)

    if config.initial_ordering is not None:
        current = Ordering(config.initial_ordering)
    else:
        current = Ordering.identity(n)
    cur_obj = objective(current)
    trace = [(0, float(cur_obj))]
    it = 0
    for it in range(1, config.barycenter_max_iters + 1):
        keys = _kernels.median_keys(stack, current.rank)
        # stable sort by key, previous position breaks ties
        cand = Ordering(current.order[np.argsort(keys[current.order], kind="stable")])
        cand_obj = objective(cand)
        if it > config.barycenter_fixed_iters and not cand_obj < cur_obj:
            break
        if cand == current:
            break  # fixed point: further passes repeat this one
        current, cur_obj = cand, cand_obj
        trace.append((it, float(cur_obj)))
    phase1_obj = cur_obj
    phase1_iters = len(trace) - 1

    # phase 2: adjacent swaps while they strictly reduce crossings
    order = current.order.copy()
    step = len(trace)
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            order[i], order[i + 1] = order[i + 1], order[i]
            cand = Ordering(order)
            cand_obj = objective(cand)
            if cand_obj < cur_obj:
                cur_obj = cand_obj
                changed = True
                trace.append((step, float(cur_obj)))
                step += 1
            else:
                order[i], order[i + 1] = order[i + 1], order[i]
    ordering = _check_ordering(order, n)
    return OrderingResult(ordering, trace, config, time.perf_counter() - t0,
                          {"objective": "weighted_crossings" if config.approach == "union"
                           else "collection_crossings",
                           "phase1_iterations": phase1_iters,
                           "phase1_objective": int(phase1_obj),
                           "final_objective": int(cur_obj)})


def nn_2opt(graph: Graph, config: OrdererConfig) -> OrderingResult:
    """Nearest-neighbour path under ``1 - s`` improved by 2-OPT on Moran's I.

    Every accepted reversal raises Moran's I by more than
    ``config.two_opt_threshold``.
    """
    t0 = time.perf_counter()
    n = graph.n
    if graph.is_degenerate():
        raise ValueError("NN-2OPT needs a graph with both edges and non-edges (0 < m < n^2)")
    moran_coefficients(n, graph.m)  # raises for n < 2
    sim = np.ascontiguousarray(similarity_matrix(graph))
    dist = 1.0 - sim

    starts = range(n) if config.nn_best_of_all else [int(config.nn_start or 0)]
    best = None
    for s in starts:
        if not 0 <= s < n:
            raise ValueError(f"nn_start {s} out of range")
        p = _kernels.nn_path(dist, s)
        value = float(sim[p[:-1], p[1:]].sum())
        if best is None or value > best[1]:
            best = (p, value)
    path = np.ascontiguousarray(best[0], dtype=np.int64)

    start_ordering = Ordering(path)
    moran = morans_i(graph, start_ordering)
    trace = [(0, moran)]
    # reversing path[i..j] changes I by 2 * (change in the consecutive-similarity sum)
    max_moves = max(1000, 50 * n * n)
    path, gains = _kernels.two_opt(sim, path, 2.0, float(config.two_opt_threshold), max_moves)
    for step, g in enumerate(gains, start=1):
        moran = moran + float(g)
        trace.append((step, moran))
    ordering = _check_ordering(path, n)
    if DEBUG:
        full = morans_i(graph, ordering)
        if abs(full - moran) > 1e-9:
            raise InvariantError(f"incremental Moran's I {moran} != recount {full}")
    return OrderingResult(ordering, trace, config, time.perf_counter() - t0,
                          {"objective": "morans_i", "nn_start": int(best[0][0]),
                           "accepted_moves": int(len(gains))})


def compute_ordering(collection: GraphCollection, config: OrdererConfig,
                     graph_index: Optional[int] = None) -> OrderingResult:
    """Run the configured algorithm on a collection."""
    if config.algorithm == "leaf_order":
        return leaf_order(collection, config)
    if config.algorithm == "barycenter":
        return barycenter(collection, config)
    if graph_index is None:
        if collection.k != 1:
            raise ValueError("NN-2OPT orders a single graph; pick one with graph_index")
        graph_index = 0
    return nn_2opt(collection[graph_index], config)
