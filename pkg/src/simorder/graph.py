"""Graphs, collections of graphs on a shared vertex set, and orderings.

Everything here is immutable after construction: the numpy buffers are
flagged read-only so they can be shared freely between threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


class Graph:
    """Undirected graph stored as a dense symmetric boolean adjacency matrix.

    Self-loops are allowed and sit on the diagonal. ``m`` counts true cells
    of the full matrix, so a non-loop edge counts twice and a loop once.
    """

    __slots__ = ("adjacency", "name")

    def __init__(self, adjacency, name: str = ""):
        adj = np.asarray(adjacency)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {adj.shape}")
        adj = adj.astype(bool)
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency matrix is not symmetric")
        self.adjacency = _frozen(adj)
        self.name = name

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]] = (),
                   loops: Iterable[int] = (), name: str = "") -> "Graph":
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"vertex index out of range: ({u}, {v}) with n={n}")
            adj[u, v] = adj[v, u] = True
        for u in loops:
            if not 0 <= u < n:
                raise ValueError(f"vertex index out of range: {u} with n={n}")
            adj[u, u] = True
        return cls(adj, name=name)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def m(self) -> int:
        return int(np.count_nonzero(self.adjacency))

    @property
    def density(self) -> float:
        return self.m / self.n ** 2

    def degrees(self) -> np.ndarray:
        """Row sums; a loop adds one to its vertex."""
        return self.adjacency.sum(axis=1)

    def neighbors(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[v])

    def edges(self) -> np.ndarray:
        """Non-loop edges as an (e, 2) array with u < v."""
        u, v = np.nonzero(np.triu(self.adjacency, k=1))
        return np.stack([u, v], axis=1)

    def loops(self) -> np.ndarray:
        return np.flatnonzero(np.diagonal(self.adjacency))

    def is_degenerate(self) -> bool:
        """True for the all-white and all-black matrix (Moran coefficients undefined)."""
        m = self.m
        return m == 0 or m == self.n ** 2

    def permuted(self, perm: Sequence[int]) -> "Graph":
        """Relabel: vertex ``perm[v]`` of the result is vertex ``v`` of self."""
        perm = np.asarray(perm)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm))
        return Graph(self.adjacency[np.ix_(inv, inv)], name=self.name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.name == other.name and np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self):
        return hash((self.name, self.adjacency.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, name={self.name!r})"


class GraphCollection:
    """k >= 1 graphs over one vertex set, with shared vertex labels."""

    __slots__ = ("graphs", "labels", "_stack")

    def __init__(self, graphs: Sequence[Graph], labels: Optional[Sequence[str]] = None):
        graphs = tuple(graphs)
        if not graphs:
            raise ValueError("a collection needs at least one graph")
        n = graphs[0].n
        if any(g.n != n for g in graphs):
            raise ValueError("all graphs in a collection must have the same vertex count")
        if labels is None:
            labels = [str(i) for i in range(n)]
        labels = tuple(str(x) for x in labels)
        if len(labels) != n:
            raise ValueError(f"expected {n} labels, got {len(labels)}")
        if len(set(labels)) != n:
            raise ValueError("vertex labels must be unique")
        self.graphs = graphs
        self.labels = labels
        self._stack = None

    @property
    def n(self) -> int:
        return self.graphs[0].n

    @property
    def k(self) -> int:
        return len(self.graphs)

    def stack(self) -> np.ndarray:
        """(k, n, n) boolean array of all adjacency matrices."""
        if self._stack is None:
            self._stack = _frozen(np.stack([g.adjacency for g in self.graphs]))
        return self._stack

    def index_of(self, label: str) -> int:
        return self.labels.index(label)

    def permuted(self, perm: Sequence[int]) -> "GraphCollection":
        perm = np.asarray(perm)
        labels = [None] * self.n
        for v, p in enumerate(perm):
            labels[p] = self.labels[v]
        return GraphCollection([g.permuted(perm) for g in self.graphs], labels)

    def __len__(self) -> int:
        return self.k

    def __iter__(self):
        return iter(self.graphs)

    def __getitem__(self, i) -> Graph:
        return self.graphs[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GraphCollection):
            return NotImplemented
        return self.labels == other.labels and self.graphs == other.graphs

    def __repr__(self) -> str:
        return f"GraphCollection(k={self.k}, n={self.n})"


class Ordering:
    """A permutation of vertices.

    ``order[i]`` is the vertex placed at position ``i``; ``rank[v]`` is the
    position of vertex ``v``.
    """

    __slots__ = ("order", "rank")

    def __init__(self, order: Sequence[int]):
        order = np.asarray(order, dtype=np.int64)
        n = order.shape[0]
        if order.ndim != 1 or not np.array_equal(np.sort(order), np.arange(n)):
            raise ValueError("ordering must be a permutation of 0..n-1")
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.arange(n)
        self.order = _frozen(order)
        self.rank = _frozen(rank)

    @classmethod
    def identity(cls, n: int) -> "Ordering":
        return cls(np.arange(n))

    @classmethod
    def from_ranks(cls, rank: Sequence[int]) -> "Ordering":
        rank = np.asarray(rank, dtype=np.int64)
        order = np.empty_like(rank)
        order[rank] = np.arange(len(rank))
        return cls(order)

    @property
    def n(self) -> int:
        return self.order.shape[0]

    def reversed(self) -> "Ordering":
        return Ordering(self.order[::-1])

    def inverse(self) -> "Ordering":
        return Ordering(self.rank)

    def tolist(self) -> list:
        return self.order.tolist()

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ordering):
            return NotImplemented
        return np.array_equal(self.order, other.order)

    def __hash__(self):
        return hash(self.order.tobytes())

    def __repr__(self) -> str:
        return f"Ordering({self.order.tolist()})"


@dataclass(frozen=True)
class WeightedUnionGraph:
    """Entry-wise sum of the collection's adjacency matrices."""

    weights: np.ndarray = field(repr=False)
    k: int

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def mean_weight(self) -> Fraction:
        """Average over all n^2 ordered pairs, diagonal included."""
        return Fraction(int(self.weights.sum()), self.n ** 2)

    def support(self) -> Graph:
        return Graph(self.weights > 0)


def build_union(collection: GraphCollection) -> WeightedUnionGraph:
    w = collection.stack().sum(axis=0, dtype=np.int64)
    return WeightedUnionGraph(weights=_frozen(w), k=collection.k)


def permute_view(graph: Graph, ordering: Ordering) -> np.ndarray:
    """The matrix as drawn: cell [i, j] is adjacency(order[i], order[j])."""
    if ordering.n != graph.n:
        raise ValueError(f"ordering has {ordering.n} vertices, graph has {graph.n}")
    o = ordering.order
    return graph.adjacency[np.ix_(o, o)]
