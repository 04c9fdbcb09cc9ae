"""Slow, independent reference implementations used only by the tests.

None of these import the package's own kernels.
"""
import itertools

import numpy as np


def random_adjacency(rng, n, p=None, loops=True):
    p = rng.uniform(0.1, 0.9) if p is None else p
    up = np.triu(rng.random((n, n)) < p, k=0 if loops else 1)
    return up | up.T


def random_nondegenerate(rng, n, loops=True):
    while True:
        A = random_adjacency(rng, n, loops=loops)
        if 0 < A.sum() < n * n:
            return A


def moran_general(M):
    """Textbook Moran's I of a 0-1 matrix with Rook neighbours, by explicit loops."""
    rows, cols = M.shape
    x = M.astype(float).ravel()
    z = x - x.mean()
    num = 0.0
    t = 0
    for i in range(rows):
        for j in range(cols):
            for di, dj in ((0, 1), (1, 0), (0, -1), (-1, 0)):
                a, b = i + di, j + dj
                if 0 <= a < rows and 0 <= b < cols:
                    num += z[i * cols + j] * z[a * cols + b]
                    t += 1
    return len(x) / t * num / (z @ z)


def drawn(A, order):
    order = np.asarray(order)
    return A[np.ix_(order, order)]


def naive_crossings(W, order):
    """Weighted crossings by testing every pair of segments.

    Each non-loop edge {u, v} gives the segments top u -> bottom v and
    top v -> bottom u; two segments of the same edge are not compared.
    """
    W = np.asarray(W, dtype=np.int64)
    n = W.shape[0]
    rank = np.empty(n, dtype=int)
    rank[np.asarray(order)] = np.arange(n)
    segs = []
    for u in range(n):
        for v in range(u + 1, n):
            if W[u, v]:
                segs.append((rank[u], rank[v], W[u, v], (u, v)))
                segs.append((rank[v], rank[u], W[u, v], (u, v)))
    total = 0
    for (a1, b1, w1, e1), (a2, b2, w2, e2) in itertools.combinations(segs, 2):
        if e1 != e2 and (a1 - a2) * (b1 - b2) < 0:
            total += w1 * w2
    return total


def random_tree(rng, n):
    """Random binary merge tree in scipy numbering (leaves 0..n-1, node n+t)."""
    active = list(range(n))
    merges = []
    for t in range(n - 1):
        i, j = sorted(rng.choice(len(active), size=2, replace=False))
        a, b = active[i], active[j]
        merges.append((a, b))
        active = [c for c in active if c not in (a, b)] + [n + t]
    return np.array(merges, dtype=np.int64).reshape(-1, 2)


def adherent_orders(merges, n):
    """All 2^(n-1) leaf sequences obtained by swapping children."""
    if n == 1:
        return [[0]]
    flips_all = itertools.product((False, True), repeat=n - 1)

    def leaves(node, flips):
        if node < n:
            return [node]
        a, b = merges[node - n]
        left, right = leaves(a, flips), leaves(b, flips)
        return right + left if flips[node - n] else left + right

    return [leaves(2 * n - 2, f) for f in flips_all]


def path_cost(order, D):
    return sum(D[order[i], order[i + 1]] for i in range(len(order) - 1))
