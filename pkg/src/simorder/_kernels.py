"""Hot inner loops, each in a numba flavour (``*_nb``) and a numpy flavour (``*_np``).

Both flavours of a kernel take and return the same things and must agree
bit for bit; ``tests/test_kernels.py`` checks that. The public names at the
bottom of the module are bound through :func:`simorder._accel.pick`.

Tie-breaking is part of every kernel's contract: whenever several choices
are equally good the one found first in row-major / ascending-id order wins.
"""
import numpy as np

from ._accel import njit, pick

INF = np.inf


# ---------------------------------------------------------------------------
# crossings: weighted inversion count
# ---------------------------------------------------------------------------

@njit
def weighted_inversions_nb(bottom, weight, n):
    """Sum of weight[i]*weight[j] over i < j with bottom[i] > bottom[j].

    ``bottom`` holds ranks in [0, n). A Fenwick tree over ranks keeps this
    O(s log n).
    """
    tree = np.zeros(n + 1, dtype=np.int64)
    total = np.int64(0)
    seen = np.int64(0)
    for j in range(bottom.shape[0]):
        b = bottom[j]
        # weight already inserted with rank <= b
        le = np.int64(0)
        i = b + 1
        while i > 0:
            le += tree[i]
            i -= i & (-i)
        total += weight[j] * (seen - le)
        seen += weight[j]
        i = b + 1
        while i <= n:
            tree[i] += weight[j]
            i += i & (-i)
    return total


def weighted_inversions_np(bottom, weight, n, chunk=128):
    bottom = np.asarray(bottom, dtype=np.int64)
    weight = np.asarray(weight, dtype=np.int64)
    s = bottom.shape[0]
    hist = np.zeros(n, dtype=np.int64)   # weight seen so far, per rank
    total = 0
    for lo in range(0, s, chunk):
        hi = min(s, lo + chunk)
        b, w = bottom[lo:hi], weight[lo:hi]
        # earlier chunks: weight with rank strictly above each b
        above = np.cumsum(hist[::-1])[::-1]
        above = np.append(above[1:], 0)
        total += int((w * above[b]).sum())
        # inside the chunk
        mask = np.triu(b[:, None] > b[None, :], k=1)
        total += int((w[:, None] * mask * w[None, :]).sum())
        np.add.at(hist, b, w)
    return np.int64(total)


# ---------------------------------------------------------------------------
# barycenter: median neighbour ranks
# ---------------------------------------------------------------------------

@njit
def median_keys_nb(stack, rank):
    """Per-vertex sort key for one barycenter pass.

    For each graph, the lower median of the vertex's neighbour ranks (loops
    ignored); then the lower median of those per-graph medians. A vertex
    with no neighbour in any graph keeps its current rank.
    """
    k, n, _ = stack.shape
    keys = np.empty(n, dtype=np.int64)
    buf = np.empty(n, dtype=np.int64)
    meds = np.empty(k, dtype=np.int64)
    for v in range(n):
        nm = 0
        for g in range(k):
            d = 0
            for u in range(n):
                if u != v and stack[g, v, u]:
                    buf[d] = rank[u]
                    d += 1
            if d > 0:
                part = np.sort(buf[:d])
                meds[nm] = part[(d - 1) // 2]
                nm += 1
        if nm == 0:
            keys[v] = rank[v]
        else:
            part = np.sort(meds[:nm])
            keys[v] = part[(nm - 1) // 2]
    return keys


def median_keys_np(stack, rank):
    stack = np.asarray(stack, dtype=bool)
    rank = np.asarray(rank, dtype=np.int64)
    k, n, _ = stack.shape
    big = np.iinfo(np.int64).max
    adj = stack & ~np.eye(n, dtype=bool)[None]
    ranks = np.where(adj, rank[None, None, :], big)
    ranks.sort(axis=2)
    deg = adj.sum(axis=2)
    idx = np.maximum(deg - 1, 0) // 2
    med = np.take_along_axis(ranks, idx[:, :, None], axis=2)[:, :, 0]
    med = np.where(deg > 0, med, big)  # (k, n)
    med.sort(axis=0)
    cnt = (deg > 0).sum(axis=0)
    mm = med[np.maximum(cnt - 1, 0) // 2, np.arange(n)]
    return np.where(cnt > 0, mm, rank).astype(np.int64)


# ---------------------------------------------------------------------------
# nearest neighbour path and 2-OPT
# ---------------------------------------------------------------------------

@njit
def nn_path_nb(dist, start):
    """Greedy path: always step to the closest unvisited vertex (lowest id on ties)."""
    n = dist.shape[0]
    path = np.empty(n, dtype=np.int64)
    used = np.zeros(n, dtype=np.bool_)
    path[0] = start
    used[start] = True
    cur = start
    for i in range(1, n):
        best = -1
        bd = INF
        for v in range(n):
            if not used[v] and (best < 0 or dist[cur, v] < bd):
                best = v
                bd = dist[cur, v]
        path[i] = best
        used[best] = True
        cur = best
    return path


def nn_path_np(dist, start):
    dist = np.asarray(dist, dtype=np.float64)
    n = dist.shape[0]
    path = np.empty(n, dtype=np.int64)
    used = np.zeros(n, dtype=bool)
    path[0] = start
    used[start] = True
    cur = start
    for i in range(1, n):
        row = np.where(used, np.inf, dist[cur])
        best = int(np.argmin(row))
        if used[best]:  # every remaining distance is +inf
            best = int(np.flatnonzero(~used)[0])
        path[i] = best
        used[best] = True
        cur = best
    return path


@njit
def _reversal_gain(sim, path, i, j):
    n = path.shape[0]
    g = 0.0
    if i > 0:
        g += sim[path[i - 1], path[j]] - sim[path[i - 1], path[i]]
    if j < n - 1:
        g += sim[path[i], path[j + 1]] - sim[path[j], path[j + 1]]
    return g


@njit
def two_opt_nb(sim, path, scale, threshold, max_moves):
    """First-improvement 2-OPT on an open path, maximising the path sum of ``sim``.

    A reversal of ``path[i..j]`` is accepted when ``scale * gain`` exceeds
    ``threshold``; the scan restarts from (0, 1) after every acceptance.
    Returns the final path and the accepted objective gains in order.
    """
    path = path.copy()
    n = path.shape[0]
    gains = np.empty(max_moves, dtype=np.float64)
    moves = 0
    improved = True
    while improved and moves < max_moves:
        improved = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                g = scale * _reversal_gain(sim, path, i, j)
                if g > threshold:
                    path[i:j + 1] = path[i:j + 1][::-1].copy()
                    gains[moves] = g
                    moves += 1
                    improved = True
                    break
            if improved:
                break
    return path, gains[:moves]


def two_opt_np(sim, path, scale, threshold, max_moves):
    sim = np.asarray(sim, dtype=np.float64)
    path = np.array(path, dtype=np.int64)
    n = path.shape[0]
    gains = []
    while len(gains) < max_moves and n > 1:
        s = sim[np.ix_(path, path)]
        adj = np.diag(s, 1)
        left = np.zeros((n, n))
        left[1:, :] = s[:-1, :] - adj[:, None]
        right = np.zeros((n, n))
        right[:, :-1] = s[:, 1:] - adj[None, :]
        # same association order as the scalar kernel: (left) + (right)
        g = scale * (left + right)
        upper = np.triu(np.ones((n, n), dtype=bool), k=1)
        hits = np.flatnonzero((g > threshold) & upper)
        if hits.size == 0:
            break
        i, j = divmod(int(hits[0]), n)
        path[i:j + 1] = path[i:j + 1][::-1]
        gains.append(g[i, j])
    return path, np.array(gains, dtype=np.float64)


# ---------------------------------------------------------------------------
# complete linkage
# ---------------------------------------------------------------------------

@njit
def _row_best(d, active, i, n):
    bj = -1
    bv = INF
    for j in range(i + 1, n):
        if active[j] and (bj < 0 or d[i, j] < bv):
            bj = j
            bv = d[i, j]
    return bj, bv


@njit
def complete_linkage_nb(dist):
    """Greedy complete-linkage merges.

    Clusters are identified by their smallest vertex id. Each step merges
    the pair with the smallest complete-linkage distance, ties going to the
    lexicographically smallest (id of A, id of B). Returns ``merges`` as
    (n-1, 2) cluster-node ids in scipy numbering (leaves 0..n-1, the t-th
    merge creates node n+t) and the merge heights.
    """
    n = dist.shape[0]
    d = dist.copy()
    active = np.ones(n, dtype=np.bool_)
    node = np.arange(n)
    best_j = np.full(n, -1, dtype=np.int64)
    best_v = np.full(n, INF)
    for i in range(n):
        best_j[i], best_v[i] = _row_best(d, active, i, n)
    merges = np.empty((max(n - 1, 0), 2), dtype=np.int64)
    heights = np.empty(max(n - 1, 0), dtype=np.float64)
    for t in range(n - 1):
        a = -1
        av = INF
        for i in range(n):
            if active[i] and best_j[i] >= 0 and (a < 0 or best_v[i] < av):
                a = i
                av = best_v[i]
        b = best_j[a]
        merges[t, 0] = node[a]
        merges[t, 1] = node[b]
        heights[t] = av
        node[a] = n + t
        active[b] = False
        for x in range(n):
            if active[x] and x != a:
                v = max(d[a, x], d[b, x])
                d[a, x] = v
                d[x, a] = v
        for x in range(n):
            if active[x] and (x == a or best_j[x] == a or best_j[x] == b):
                best_j[x], best_v[x] = _row_best(d, active, x, n)
    return merges, heights


def complete_linkage_np(dist):
    d = np.array(dist, dtype=np.float64)
    n = d.shape[0]
    active = np.ones(n, dtype=bool)
    node = np.arange(n)
    best_j = np.full(n, -1, dtype=np.int64)
    best_v = np.full(n, np.inf)

    def row_best(i):
        cand = np.flatnonzero(active[i + 1:]) + i + 1
        if cand.size == 0:
            return -1, np.inf
        k = int(np.argmin(d[i, cand]))
        return int(cand[k]), d[i, cand[k]]

    for i in range(n):
        best_j[i], best_v[i] = row_best(i)
    m = max(n - 1, 0)
    merges = np.empty((m, 2), dtype=np.int64)
    heights = np.empty(m, dtype=np.float64)
    for t in range(m):
        live = np.flatnonzero(active & (best_j >= 0))
        a = int(live[np.argmin(best_v[live])])
        b = int(best_j[a])
        merges[t] = node[a], node[b]
        heights[t] = best_v[a]
        node[a] = n + t
        active[b] = False
        others = active.copy()
        others[a] = False
        merged = np.maximum(d[a], d[b])
        d[a, others] = merged[others]
        d[others, a] = merged[others]
        redo = np.flatnonzero(active & ((np.arange(n) == a) | (best_j == a) | (best_j == b)))
        for x in redo:
            best_j[x], best_v[x] = row_best(x)
    return merges, heights


# ---------------------------------------------------------------------------
# optimal leaf ordering
# ---------------------------------------------------------------------------
#
# M[a, b] is the cheapest cost of a leaf sequence of the LCA subtree of a and
# b that starts at a and ends at b. Every leaf pair has a unique LCA, so one
# n x n table holds the whole DP. For node v = (L, R), a in L, b in R:
#   T[a, y]  = min_x M[a, x] + D[x, y]       x in the other child of L than a
#   M[a, b]  = min_y T[a, y] + M[y, b]       y in the other child of R than b
# A leaf child contributes x = a (resp. y = b) with M = 0. M[b, a] = M[a, b].
# Each node's leaves are stored contiguously, first child's leaves first, so
# "the other child" is an index range inside the node's leaf list.

@njit
def _other_half(merges, size, node, idx, n):
    if node < n:
        return 0, 1
    s1 = size[merges[node - n, 0]]
    if idx < s1:
        return s1, size[node]
    return 0, s1


@njit
def olo_nb(merges, dist):
    n = dist.shape[0]
    if n == 1:
        return np.zeros(1, dtype=np.int64)
    total = 2 * n - 1
    size = np.ones(total, dtype=np.int64)
    for t in range(n - 1):
        size[n + t] = size[merges[t, 0]] + size[merges[t, 1]]
    offs = np.zeros(total + 1, dtype=np.int64)
    for v in range(total):
        offs[v + 1] = offs[v] + size[v]
    buf = np.empty(offs[total], dtype=np.int64)
    for v in range(n):
        buf[offs[v]] = v
    M = np.full((n, n), INF)
    for a in range(n):
        M[a, a] = 0.0
    for t in range(n - 1):
        v = n + t
        L = merges[t, 0]
        R = merges[t, 1]
        nl = size[L]
        nr = size[R]
        ls = buf[offs[L]:offs[L + 1]]
        rs = buf[offs[R]:offs[R + 1]]
        o = offs[v]
        for i in range(nl):
            buf[o + i] = ls[i]
        for i in range(nr):
            buf[o + nl + i] = rs[i]
        T = np.empty((nl, nr))
        for ia in range(nl):
            a = ls[ia]
            xlo, xhi = _other_half(merges, size, L, ia, n)
            for iy in range(nr):
                y = rs[iy]
                best = INF
                for ix in range(xlo, xhi):
                    x = ls[ix]
                    c = M[a, x] + dist[x, y]
                    if c < best:
                        best = c
                T[ia, iy] = best
        for ib in range(nr):
            b = rs[ib]
            ylo, yhi = _other_half(merges, size, R, ib, n)
            for ia in range(nl):
                a = ls[ia]
                best = INF
                for iy in range(ylo, yhi):
                    c = T[ia, iy] + M[rs[iy], b]
                    if c < best:
                        best = c
                M[a, b] = best
                M[b, a] = best
    return _olo_backtrack_nb(merges, dist, M, buf, offs, size, n)


@njit
def _olo_backtrack_nb(merges, dist, M, buf, offs, size, n):
    root = 2 * n - 2
    # root endpoints come from different children; smallest cost, then a, then b
    side = np.zeros(n, dtype=np.bool_)
    first = merges[n - 2, 0]
    for i in range(offs[first], offs[first + 1]):
        side[buf[i]] = True
    ba = -1
    bb = -1
    bc = INF
    for a in range(n):
        for b in range(n):
            if side[a] != side[b] and (ba < 0 or M[a, b] < bc):
                ba = a
                bb = b
                bc = M[a, b]
    out = np.empty(n, dtype=np.int64)
    stack = np.empty((n, 4), dtype=np.int64)
    stack[0, 0] = root
    stack[0, 1] = ba
    stack[0, 2] = bb
    stack[0, 3] = 0
    sp = 1
    while sp > 0:
        sp -= 1
        v = stack[sp, 0]
        a = stack[sp, 1]
        b = stack[sp, 2]
        pos = stack[sp, 3]
        if v < n:
            out[pos] = v
            continue
        L = merges[v - n, 0]
        R = merges[v - n, 1]
        ia = -1
        for i in range(size[L]):
            if buf[offs[L] + i] == a:
                ia = i
        if ia < 0:
            L, R = R, L
            for i in range(size[L]):
                if buf[offs[L] + i] == a:
                    ia = i
        ib = 0
        for i in range(size[R]):
            if buf[offs[R] + i] == b:
                ib = i
        ls = buf[offs[L]:offs[L + 1]]
        rs = buf[offs[R]:offs[R + 1]]
        xlo, xhi = _other_half(merges, size, L, ia, n)
        ylo, yhi = _other_half(merges, size, R, ib, n)
        y = -1
        best = INF
        for iy in range(ylo, yhi):
            y0 = rs[iy]
            tx = INF
            for ix in range(xlo, xhi):
                c = M[a, ls[ix]] + dist[ls[ix], y0]
                if c < tx:
                    tx = c
            c = tx + M[y0, b]
            if y < 0 or c < best or (c == best and y0 < y):
                y = y0
                best = c
        x = -1
        best = INF
        for ix in range(xlo, xhi):
            x0 = ls[ix]
            c = M[a, x0] + dist[x0, y]
            if x < 0 or c < best or (c == best and x0 < x):
                x = x0
                best = c
        stack[sp, 0] = L
        stack[sp, 1] = a
        stack[sp, 2] = x
        stack[sp, 3] = pos
        stack[sp + 1, 0] = R
        stack[sp + 1, 1] = y
        stack[sp + 1, 2] = b
        stack[sp + 1, 3] = pos + size[L]
        sp += 2
    return out


def _node_leaves(merges, n):
    leaves = [[v] for v in range(n)]
    for t in range(n - 1):
        leaves.append(leaves[merges[t, 0]] + leaves[merges[t, 1]])
    return [np.asarray(x, dtype=np.int64) for x in leaves]


def _split_mask(merges, leaves, node, n):
    """valid[i, j]: leaves i and j of ``node`` lie in different children (or node is a leaf)."""
    if node < n:
        return np.ones((1, 1), dtype=bool)
    half = np.zeros(len(leaves[node]), dtype=bool)
    half[:len(leaves[merges[node - n, 0]])] = True
    return half[:, None] != half[None, :]


def _minplus(A, B, chunk):
    """C[i, j] = min_k A[i, k] + B[k, j], row-chunked to bound memory."""
    rows = max(1, chunk // max(1, A.shape[1] * B.shape[1]))
    out = np.empty((A.shape[0], B.shape[1]))
    for lo in range(0, A.shape[0], rows):
        out[lo:lo + rows] = (A[lo:lo + rows, :, None] + B[None, :, :]).min(axis=1)
    return out


def olo_np(merges, dist, chunk=1 << 22):
    dist = np.asarray(dist, dtype=np.float64)
    merges = np.asarray(merges, dtype=np.int64)
    n = dist.shape[0]
    if n == 1:
        return np.zeros(1, dtype=np.int64)
    leaves = _node_leaves(merges, n)
    M = np.full((n, n), np.inf)
    np.fill_diagonal(M, 0.0)

    def inner(node):
        ls = leaves[node]
        return np.where(_split_mask(merges, leaves, node, n), M[np.ix_(ls, ls)], np.inf)

    for t in range(n - 1):
        L, R = merges[t]
        ls, rs = leaves[L], leaves[R]
        T = _minplus(inner(L), dist[np.ix_(ls, rs)], chunk)
        block = _minplus(T, inner(R), chunk)
        M[np.ix_(ls, rs)] = block
        M[np.ix_(rs, ls)] = block.T

    side = np.zeros(n, dtype=bool)
    side[leaves[merges[n - 2, 0]]] = True
    off = np.where(side[:, None] != side[None, :], M, np.inf)
    a0, b0 = divmod(int(np.argmin(off)), n)  # row-major: smallest cost, then a, then b
    out = np.empty(n, dtype=np.int64)
    stack = [(2 * n - 2, a0, b0, 0)]
    while stack:
        v, a, b, pos = stack.pop()
        if v < n:
            out[pos] = v
            continue
        L, R = merges[v - n]
        if not np.any(leaves[L] == a):
            L, R = R, L
        ls, rs = leaves[L], leaves[R]
        row_a = inner(L)[np.flatnonzero(ls == a)[0]]
        col_b = inner(R)[:, np.flatnonzero(rs == b)[0]]
        tx = (row_a[:, None] + dist[np.ix_(ls, rs)]).min(axis=0)
        c = tx + col_b
        y = int(rs[c == c.min()].min())
        cx = row_a + dist[ls, y]
        x = int(ls[cx == cx.min()].min())
        stack.append((L, a, x, pos))
        stack.append((R, y, b, pos + len(ls)))
    return out


weighted_inversions = pick(weighted_inversions_nb, weighted_inversions_np)
median_keys = pick(median_keys_nb, median_keys_np)
nn_path = pick(nn_path_nb, nn_path_np)
two_opt = pick(two_opt_nb, two_opt_np)
complete_linkage = pick(complete_linkage_nb, complete_linkage_np)
olo = pick(olo_nb, olo_np)
