"""Time the numba and numpy flavours of each hot kernel on the same inputs.

Usage: python3 benchmarks/bench_kernels.py [--sizes 64,128,256] [--repeat 3]
"""
import argparse
import time

import numpy as np

from simorder import _accel, _kernels
from simorder.distances import similarity_matrix
from simorder.graph import Graph


def _best(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _cases(n, rng):
    up = np.triu(rng.random((n, n)) < 0.2)
    A = up | up.T
    S = np.ascontiguousarray(similarity_matrix(Graph(A)))
    D = np.ascontiguousarray(1.0 - S)
    np.fill_diagonal(D, 0.0)
    e = np.argwhere(np.triu(A, 1))
    bottom = np.concatenate([e[:, 1], e[:, 0]]).astype(np.int64)
    weight = np.ones(bottom.size, dtype=np.int64)
    stack = np.ascontiguousarray(np.stack([A, A.T]))
    rank = rng.permutation(n).astype(np.int64)
    path = np.ascontiguousarray(_kernels.nn_path_np(D, 0), dtype=np.int64)
    merges, _ = _kernels.complete_linkage_np(D)
    merges = np.ascontiguousarray(merges, dtype=np.int64)
    return {
        "weighted_inversions": (lambda f: f(bottom, weight, n)),
        "median_keys": (lambda f: f(stack, rank)),
        "nn_path": (lambda f: f(D, 0)),
        "two_opt": (lambda f: f(S, path.copy(), 2.0, 1e-4, 100000)),
        "complete_linkage": (lambda f: f(D)),
        "olo": (lambda f: f(merges, D)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="64,128,256")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not available (or SIMORDER_DISABLE_NUMBA is set)")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<20}{'n':>6}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for n in (int(s) for s in args.sizes.split(",")):
        for name, call in _cases(n, rng).items():
            nb = getattr(_kernels, name + "_nb")
            npf = getattr(_kernels, name + "_np")
            call(nb)  # compile outside the timing
            t_nb = _best(lambda: call(nb), args.repeat)
            t_np = _best(lambda: call(npf), args.repeat)
            print(f"{name:<20}{n:>6}{t_nb:>12.5f}{t_np:>12.5f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
