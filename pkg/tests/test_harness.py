import numpy as np
import pytest

from simorder.graph import Graph, GraphCollection, Ordering
from simorder.harness import (PATTERN_KINDS, ComplementarySpec, PatternSpec, dataset_stats,
                              generate_complementary, generate_pattern, lower_median, matched_anti_patterns,
                              run_experiment, summarize, synthetic_suite, verify_report)
from simorder.metrics import morans_i
from simorder.orderers import OrdererConfig


@pytest.mark.parametrize("kind", PATTERN_KINDS)
@pytest.mark.parametrize("n", [8, 13])
def test_patterns_symmetric_and_deterministic(kind, n):
    a = generate_pattern(PatternSpec(kind, n, seed=3))
    b = generate_pattern(PatternSpec(kind, n, seed=3))
    assert a == b
    assert np.array_equal(a.adjacency, a.adjacency.T)


def test_pattern_spec_round_trip():
    spec = PatternSpec("bands", 16, offsets=(2, 6), width=2)
    assert PatternSpec.from_dict(spec.to_dict()) == spec


def test_bad_pattern_parameters():
    with pytest.raises(ValueError):
        generate_pattern(PatternSpec("block", 6, blocks=(2, 2)))
    with pytest.raises(ValueError):
        generate_pattern(PatternSpec("spiral", 6))
    with pytest.raises(ValueError):
        generate_pattern(PatternSpec("noise", 6, p=1.5))


def test_anti_patterns_match_density():
    pat = generate_pattern(PatternSpec("block", 16))
    anti = matched_anti_patterns(pat)
    for g in anti.values():
        assert g.n == 16
        assert abs(g.density - pat.density) < 0.1


def test_complementary_noiseless_union_is_complete():
    coll = generate_complementary(ComplementarySpec((5, 4)))
    s = coll.stack()
    assert coll.k == 2 and coll.n == 9
    assert not (s[0] & s[1]).any()
    off = ~np.eye(9, dtype=bool)
    assert np.array_equal(s[0] | s[1], off)


def test_dataset_stats_by_hand():
    g1 = Graph.from_edges(2, [])
    g2 = Graph.from_edges(2, [(0, 1)])
    g3 = Graph.from_edges(2, [(0, 1)], loops=[0, 1])
    st = dataset_stats(GraphCollection([g1, g2, g3]))
    assert st.k == 3 and st.n == 2
    assert st.density_mean == pytest.approx(0.5)
    assert st.density_std == pytest.approx(np.std([0, 0.5, 1.0]))
    assert st.change_mean == pytest.approx(0.5)
    assert st.change_std == 0
    assert dataset_stats(GraphCollection([g1])).change_mean is None


def test_lower_median_and_summary():
    assert lower_median([4, 1, 3, 2]) == 2
    assert summarize([1.0, 2.0, 6.0]) == {"min": 1.0, "median": 2.0, "mean": 3.0}


def test_experiment_report_round_trip():
    coll = generate_complementary(ComplementarySpec((4, 4), p=0.1, seed=1))
    cfgs = [OrdererConfig.from_name(n) for n in ("U-LO-l2", "C-LO-deltai", "C-BC")]
    rep = run_experiment(coll, cfgs, dataset="comp")
    assert verify_report(rep, coll) == []
    assert len(rep.rows) == 3 * coll.k
    assert max(r["normalized_la"] for r in rep.rows) <= 1.0
    assert min(r["normalized_la"] for r in rep.rows) == 0.0
    assert rep.to_csv().count("\n") == 1 + len(rep.rows)
    # tampering is detected
    rep.rows[0]["morans_i"] += 0.5
    assert verify_report(rep, coll)


def test_experiment_rejects_duplicates():
    coll = generate_complementary(ComplementarySpec((3, 3)))
    with pytest.raises(ValueError):
        run_experiment(coll, [OrdererConfig(), OrdererConfig()])


def test_threads_do_not_change_results(monkeypatch):
    coll = synthetic_suite(0)["patterns"]
    cfgs = [OrdererConfig.from_name(n) for n in ("U-LO-l2", "C-LO-l2", "C-BC")]
    one = run_experiment(coll, cfgs)
    monkeypatch.setenv("SIMORDER_THREADS", "3")
    three = run_experiment(coll, cfgs)
    assert one.rows == three.rows


def test_synthetic_suite_seeded():
    a, b = synthetic_suite(5), synthetic_suite(5)
    assert set(a) == {"complementary", "drifting_blocks", "patterns"}
    assert all(a[k] == b[k] for k in a)


def test_patterns_beat_noise_on_average():
    for kind in ("block", "off_diagonal_block", "line_star", "bands"):
        for n in (8, 16):
            pat = generate_pattern(PatternSpec(kind, n))
            ident = Ordering.identity(n)
            noise = [morans_i(matched_anti_patterns(pat, seed=s)["noise"], ident) for s in range(50)]
            assert morans_i(pat, ident) > np.mean(noise)
