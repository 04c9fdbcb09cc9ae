import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from simorder.graph import Graph, GraphCollection, Ordering, build_union
from simorder.metrics import (bandwidth, collection_crossings, count_adjacencies, crossings,
                              grid_weights, linear_arrangement, moran_coefficients, morans_i,
                              morans_i_general, morans_i_two_orderings, normalized_linear_arrangement,
                              profile, weighted_crossings)
from oracles import drawn, moran_general, naive_crossings, random_adjacency, random_nondegenerate


@pytest.fixture
def star():
    # b is joined to a and c; vertex ids a=0, b=1, c=2
    return Graph.from_edges(3, [(0, 1), (1, 2)])


def test_star_counts_and_moran(star):
    o = Ordering([1, 0, 2])
    c = count_adjacencies(star, o)
    assert (c.black, c.white, c.mixed) == (2, 4, 6)
    assert morans_i(star, o) == pytest.approx(-0.025, abs=1e-12)
    assert morans_i_general(drawn(star.adjacency, o.order).ravel(), grid_weights(3)) == \
        pytest.approx(-0.025, abs=1e-12)


def test_star_checkerboard(star):
    assert morans_i(star, Ordering.identity(3)) == pytest.approx(-1.0, abs=1e-12)


def test_two_orderings_example(star):
    v = morans_i_two_orderings(star, Ordering([1, 0, 2]), Ordering.identity(3))
    assert v == pytest.approx(-0.5125, abs=1e-12)


def test_counts_total(rng):
    for n in range(2, 9):
        g = Graph(random_adjacency(rng, n))
        c = count_adjacencies(g, Ordering(rng.permutation(n)))
        assert c.total == 2 * n * (n - 1)
        assert min(c.black, c.white, c.mixed) >= 0


def test_uniform_matrix_scores_one():
    n = 4
    assert morans_i(Graph(np.zeros((n, n), bool)), Ordering.identity(n)) == 1.0
    assert morans_i(Graph(np.ones((n, n), bool)), Ordering.identity(n)) == 1.0


def test_coefficients_need_both_colours():
    with pytest.raises(ValueError):
        moran_coefficients(3, 0)
    with pytest.raises(ValueError):
        moran_coefficients(3, 9)
    c = moran_coefficients(3, 4)
    assert c.c_black > 0 and c.c_white > 0


def test_needs_two_vertices():
    with pytest.raises(ValueError):
        morans_i(Graph(np.ones((1, 1), bool)), Ordering.identity(1))


def test_general_zero_variance():
    with pytest.raises(ValueError, match="zero variance"):
        morans_i_general(np.zeros(4), grid_weights(2))


def test_general_matches_loop_oracle(rng):
    for _ in range(20):
        M = rng.random((4, 5)) < 0.4
        if M.all() or not M.any():
            continue
        assert morans_i_general(M.ravel(), grid_weights(4, 5)) == pytest.approx(moran_general(M), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**31 - 1))
def test_moran_within_bounds_and_reverse_invariant(n, seed):
    rng = np.random.default_rng(seed)
    g = Graph(random_nondegenerate(rng, n))
    o = Ordering(rng.permutation(n))
    v = morans_i(g, o)
    assert -1 - 1e-12 <= v <= 1 + 1e-12
    assert morans_i(g, o.reversed()) == pytest.approx(v, abs=1e-12)


def test_moran_bounds_exhaustive_small():
    # every graph on 3 vertices (with loops) under every ordering
    cells = [(i, j) for i in range(3) for j in range(i, 3)]
    for bits in itertools.product((0, 1), repeat=len(cells)):
        A = np.zeros((3, 3), bool)
        for b, (i, j) in zip(bits, cells):
            A[i, j] = A[j, i] = bool(b)
        g = Graph(A)
        for perm in itertools.permutations(range(3)):
            assert -1 - 1e-12 <= morans_i(g, Ordering(perm)) <= 1 + 1e-12


def test_path_measures():
    # path 1-2-3-4 as vertices 0..3, ordered (2,4,1,3)
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    o = Ordering([1, 3, 0, 2])
    assert bandwidth(g, o) == 3
    assert linear_arrangement(g, o) == 7
    assert linear_arrangement(g, o, double=True) == 14
    assert profile(g, Ordering.identity(4)) == 3


def test_measures_without_edges():
    g = Graph.from_edges(4, [], loops=[1])
    o = Ordering.identity(4)
    assert bandwidth(g, o) == 0 and profile(g, o) == 0 and linear_arrangement(g, o) == 0
    assert crossings(g, o) == 0


def test_profile_by_definition(rng):
    for _ in range(20):
        n = int(rng.integers(2, 9))
        g = Graph(random_adjacency(rng, n))
        o = Ordering(rng.permutation(n))
        M = drawn(g.adjacency, o.order)
        expect = sum(i - min(j for j in range(i) if M[i, j]) for i in range(n) if M[i, :i].any())
        assert profile(g, o) == expect


def test_normalized_la():
    assert normalized_linear_arrangement([0, 5, 10]) == [1.0, 0.5, 0.0]
    assert normalized_linear_arrangement([0, 0]) == [1.0, 1.0]
    with pytest.raises(ValueError):
        normalized_linear_arrangement([])


def test_crossings_example():
    # edges a-b and c-d in order (a, c, b, d): the segments a->b and c->d cross, and so do b->a and d->c
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    assert crossings(g, Ordering([0, 2, 1, 3])) == 2
    assert crossings(g, Ordering.identity(4)) == 0


def test_crossings_ignore_loops(rng):
    A = random_adjacency(rng, 6, loops=False)
    B = A.copy()
    np.fill_diagonal(B, True)
    o = Ordering(rng.permutation(6))
    assert crossings(Graph(A), o) == crossings(Graph(B), o)


def test_crossings_match_naive(rng):
    for _ in range(30):
        n = int(rng.integers(2, 9))
        g = Graph(random_adjacency(rng, n))
        o = Ordering(rng.permutation(n))
        assert crossings(g, o) == naive_crossings(g.adjacency, o.order)


def test_weighted_crossings_single_graph_equals_plain(rng):
    g = Graph(random_adjacency(rng, 7))
    o = Ordering(rng.permutation(7))
    assert weighted_crossings(build_union(GraphCollection([g])), o) == crossings(g, o)


def test_collection_crossings_is_sum(rng):
    gs = [Graph(random_adjacency(rng, 6)) for _ in range(3)]
    o = Ordering(rng.permutation(6))
    assert collection_crossings(GraphCollection(gs), o) == sum(crossings(g, o) for g in gs)


def test_checkerboard_has_only_mixed_pairs():
    # complete bipartite between even and odd vertices, with loops on matching parity cells
    A = np.zeros((4, 4), bool)
    for i in range(4):
        for j in range(4):
            A[i, j] = (i + j) % 2 == 1
    c = count_adjacencies(Graph(A), Ordering.identity(4))
    assert (c.black, c.white, c.mixed) == (0, 0, 24)


def test_crossings_mirror_symmetric(rng):
    for _ in range(10):
        g = Graph(random_adjacency(rng, 8))
        o = Ordering(rng.permutation(8))
        assert crossings(g, o) == crossings(g, o.reversed())


def test_weighted_crossings_example_and_information_loss():
    # vertices 1..4 as 0..3; edges {1,3} and {2,4}
    g13 = Graph.from_edges(4, [(0, 2)])
    g24 = Graph.from_edges(4, [(1, 3)])
    ident = Ordering.identity(4)
    coll = GraphCollection([g13, g24])
    assert collection_crossings(coll, ident) == 0
    assert weighted_crossings(build_union(coll), ident) == 2
    heavy = GraphCollection([g13, g13, g24, g24, g24])
    assert weighted_crossings(build_union(heavy), ident) == 12


def test_normalized_la_examples():
    assert normalized_linear_arrangement([10, 20, 40]) == [0.75, 0.5, 0.0]
    assert normalized_linear_arrangement([7, 7]) == [0.0, 0.0]
    assert normalized_linear_arrangement([0, 5]) == [1.0, 0.0]
