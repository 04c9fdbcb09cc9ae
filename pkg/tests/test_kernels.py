import json
import os
import subprocess
import sys

import numpy as np
import pytest

from simorder import _accel, _kernels
from simorder.distances import similarity_matrix
from simorder.graph import Graph
from oracles import random_adjacency, random_nondegenerate, random_tree

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def _dist(rng, n):
    X = rng.integers(0, 5, (n, n)).astype(float) if rng.integers(2) else rng.random((n, n))
    D = (X + X.T) / 2
    np.fill_diagonal(D, 0)
    return np.ascontiguousarray(D)


@needs_numba
def test_weighted_inversions_agree(rng):
    for _ in range(30):
        n = int(rng.integers(1, 40))
        s = int(rng.integers(0, 200))
        bottom = rng.integers(0, n, s).astype(np.int64)
        w = rng.integers(1, 4, s).astype(np.int64)
        a = _kernels.weighted_inversions_nb(bottom, w, n)
        b = _kernels.weighted_inversions_np(bottom, w, n, chunk=17)
        assert int(a) == int(b)


@needs_numba
def test_median_keys_agree(rng):
    for _ in range(20):
        k, n = int(rng.integers(1, 4)), int(rng.integers(2, 15))
        stack = np.ascontiguousarray(np.stack([random_adjacency(rng, n) for _ in range(k)]))
        rank = rng.permutation(n).astype(np.int64)
        assert np.array_equal(_kernels.median_keys_nb(stack, rank), _kernels.median_keys_np(stack, rank))


@needs_numba
def test_nn_and_two_opt_agree(rng):
    for _ in range(20):
        n = int(rng.integers(3, 14))
        S = np.ascontiguousarray(similarity_matrix(Graph(random_nondegenerate(rng, n))))
        start = int(rng.integers(n))
        p1 = _kernels.nn_path_nb(1.0 - S, start)
        p2 = _kernels.nn_path_np(1.0 - S, start)
        assert np.array_equal(p1, p2)
        path = np.ascontiguousarray(p1, dtype=np.int64)
        a, ga = _kernels.two_opt_nb(S, path.copy(), 2.0, 1e-4, 10000)
        b, gb = _kernels.two_opt_np(S, path.copy(), 2.0, 1e-4, 10000)
        assert np.array_equal(a, b)
        assert np.allclose(ga, gb, atol=1e-12)


@needs_numba
def test_linkage_and_olo_agree(rng):
    for _ in range(40):
        n = int(rng.integers(1, 12))
        D = _dist(rng, n)
        m1, h1 = _kernels.complete_linkage_nb(D)
        m2, h2 = _kernels.complete_linkage_np(D)
        assert np.array_equal(m1, m2) and np.array_equal(h1, h2)
        merges = np.ascontiguousarray(random_tree(rng, n))
        assert np.array_equal(_kernels.olo_nb(merges, D), _kernels.olo_np(merges, D, chunk=64))


SCRIPT = """
import json
from simorder import _accel
from simorder.harness import synthetic_suite
from simorder.orderers import OrdererConfig, compute_ordering
coll = synthetic_suite(0)["patterns"]
out = {"use_numba": _accel.USE_NUMBA}
for name in ("U-LO-l2", "C-LO-deltai", "C-BC"):
    out[name] = compute_ordering(coll, OrdererConfig.from_name(name)).ordering.tolist()
g = coll[0]
from simorder.graph import GraphCollection
out["nn"] = compute_ordering(GraphCollection([g]), OrdererConfig(algorithm="nn2opt")).ordering.tolist()
print(json.dumps(out))
"""


def _run(disable):
    env = dict(os.environ, SIMORDER_DISABLE_NUMBA="1" if disable else "0")
    res = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


@needs_numba
def test_env_flag_selects_numpy_and_results_match():
    fast, slow = _run(False), _run(True)
    assert fast.pop("use_numba") is True
    assert slow.pop("use_numba") is False
    assert fast == slow
