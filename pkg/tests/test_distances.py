import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from simorder.distances import (Approach, MetricKind, collection_distance, delta_i, delta_i_matrix,
                                distance_matrix, l2_neighborhood, pair_counts, similarity_matrix,
                                similarity_s, union_distance, union_distance_matrix)
from simorder.graph import Graph, GraphCollection, Ordering, build_union
from simorder.metrics import morans_i
from oracles import random_adjacency, random_nondegenerate


def test_metric_parsing():
    assert MetricKind.parse("deltaI") is MetricKind.DELTA_I
    assert MetricKind.parse("delta_i_sq") is MetricKind.DELTA_I_SQ
    assert MetricKind.parse("L2") is MetricKind.L2
    assert Approach.parse("C") is Approach.AWARE
    with pytest.raises(ValueError):
        MetricKind.parse("cosine")
    with pytest.raises(ValueError):
        Approach.parse("mixed")


def test_pair_counts_by_hand():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    # rows 0 and 2 are both (0,1,0): one common neighbour, two common non-neighbours
    assert pair_counts(g, 0, 2) == (1, 2)
    assert pair_counts(g, 0, 1) == (0, 0)


def test_similarity_matrix_matches_pairs(rng):
    g = Graph(random_nondegenerate(rng, 7))
    S = similarity_matrix(g)
    for u in range(7):
        for v in range(7):
            assert S[u, v] == pytest.approx(similarity_s(g, u, v), abs=1e-15)
            assert delta_i_matrix(g)[u, v] == pytest.approx(delta_i(g, u, v), abs=1e-15)


def test_path_sum_identity(rng):
    for _ in range(50):
        n = int(rng.integers(2, 10))
        g = Graph(random_nondegenerate(rng, n))
        o = rng.permutation(n)
        S = similarity_matrix(g)
        assert morans_i(g, Ordering(o)) == pytest.approx(-1 + 2 * S[o[:-1], o[1:]].sum(), abs=1e-12)


def test_self_distance_can_be_negative():
    # n=2 with a single loop: s(0,0) = c_B*1 + c_W*1 = 1/2 + 1/3
    g = Graph.from_edges(2, [], loops=[0])
    assert delta_i(g, 0, 0) < 0


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 9), st.integers(0, 2**31 - 1))
def test_delta_i_triangle_distinct(n, seed):
    g = Graph(random_nondegenerate(np.random.default_rng(seed), n))
    D = delta_i_matrix(g)
    idx = np.arange(n)
    distinct = (idx[:, None, None] != idx[None, :, None]) & (idx[None, :, None] != idx[None, None, :]) \
        & (idx[:, None, None] != idx[None, None, :])
    slack = D[:, None, :] - D[:, :, None] - D[None, :, :]
    # slack[u, v, w] = D[u,w] - D[u,v] - D[v,w]
    assert (slack[distinct] <= 1e-12).all()


def test_l2_counts_differing_cells():
    g = Graph.from_edges(3, [(0, 1)], loops=[2])
    assert l2_neighborhood(g, 0, 2, squared=True) == 2.0
    assert l2_neighborhood(g, 0, 2) == pytest.approx(np.sqrt(2))


def test_union_moran_normalized_equals_delta_for_one_graph(rng):
    for _ in range(20):
        n = int(rng.integers(2, 10))
        g = Graph(random_nondegenerate(rng, n))
        u = build_union(GraphCollection([g]))
        got = union_distance_matrix(u, MetricKind.UNION_MORAN, normalized=True)
        assert np.allclose(got, delta_i_matrix(g), atol=1e-12)


def test_union_moran_pairwise_matches_matrix(rng):
    coll = GraphCollection([Graph(random_adjacency(rng, 6)) for _ in range(3)])
    u = build_union(coll)
    for normalized in (False, True):
        M = union_distance_matrix(u, "unionmoran", normalized)
        assert union_distance(u, 1, 4, "unionmoran", normalized) == pytest.approx(M[1, 4], abs=1e-12)


@pytest.mark.parametrize("metric", ["l2", "l2sq"])
def test_union_equals_aware_for_one_graph(rng, metric):
    coll = GraphCollection([Graph(random_adjacency(rng, 8))])
    a = distance_matrix(coll, "union", metric).values
    b = distance_matrix(coll, "aware", metric).values
    assert np.array_equal(a, b)


@pytest.mark.parametrize("metric", ["l2", "l2sq", "deltai", "deltaisq"])
def test_aware_is_sum_of_graphs(rng, metric):
    coll = GraphCollection([Graph(random_nondegenerate(rng, 6)) for _ in range(3)])
    D = distance_matrix(coll, "aware", metric).values
    for u in range(6):
        for v in range(6):
            assert D[u, v] == pytest.approx(collection_distance(coll, u, v, metric), abs=1e-12)


def test_uniform_graph_contributes_nothing(rng):
    g = Graph(random_nondegenerate(rng, 5))
    empty = Graph(np.zeros((5, 5), bool))
    a = distance_matrix(GraphCollection([g]), "aware", "deltai").values
    b = distance_matrix(GraphCollection([g, empty]), "aware", "deltai").values
    assert np.array_equal(a, b)


def test_distance_matrix_symmetric_read_only(rng):
    coll = GraphCollection([Graph(random_adjacency(rng, 6)) for _ in range(2)])
    dm = distance_matrix(coll, "union", "l2")
    assert np.array_equal(dm.values, dm.values.T)
    with pytest.raises(ValueError):
        dm.values[0, 0] = 1.0
    assert dm.to_csv().startswith("# metric=l2 approach=union")


def test_union_rejects_per_graph_metric(rng):
    u = build_union(GraphCollection([Graph(random_adjacency(rng, 4))]))
    with pytest.raises(ValueError):
        union_distance_matrix(u, "deltai")


def test_union_moran_self_distance_nonpositive(rng):
    u = build_union(GraphCollection([Graph(random_adjacency(rng, 7)) for _ in range(3)]))
    assert (np.diag(union_distance_matrix(u, "unionmoran")) <= 1e-12).all()


def test_complementary_union_has_no_information():
    from simorder.harness import ComplementarySpec, generate_complementary
    coll = generate_complementary(ComplementarySpec((8, 8)))
    D = distance_matrix(coll, "union", "l2").values
    off = D[~np.eye(16, dtype=bool)]
    assert np.all(off == off[0])
