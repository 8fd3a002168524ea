import random
from collections import Counter

import pytest

from citeproj.metrics import density
from citeproj.nullmodel import (
    COMPARED_METRICS,
    child_seed,
    compare_pairs,
    compare_real_vs_random,
    make_rng,
    randomize_degree_preserving,
)
from citeproj.synth import PrototypeSpec, generate_prototype

from conftest import clique, make_graph, make_pair

TWO_CLIQUES = clique(4) + [(u + 4, v + 4) for u, v in clique(4)] + [(3, 4)]


def _degrees(edges):
    return Counter(u for u, _ in edges), Counter(v for _, v in edges)


def _check_simple(edges):
    assert all(u != v for u, v in edges)
    assert len(set(edges)) == len(edges)
    assert not any((v, u) in set(edges) for u, v in edges)


def test_single_edge_unchanged():
    pair = make_pair(2, [(0, 1)])
    r = randomize_degree_preserving(pair, 7)
    assert r.edges == pair.gp_edges
    assert r.accepted_swaps == 0


def test_golden_two_clique(data_dir):
    golden = []
    for line in (data_dir / "two_clique_seed42.tsv").read_text().splitlines():
        if line and not line.startswith("#"):
            u, v = line.split("\t")
            golden.append((u, v))
    r = randomize_degree_preserving(make_pair(8, TWO_CLIQUES), 42)
    assert list(r.edges) == golden
    assert r.attempted_swaps == 100 * len(TWO_CLIQUES)


def test_degree_sequences_preserved():
    rng = random.Random(3)
    for trial in range(40):
        n = rng.randint(2, 25)
        p = rng.random() * 0.5
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        pair = make_pair(n, edges)
        r = randomize_degree_preserving(pair, trial, swap_factor=20)
        assert _degrees(r.edges) == _degrees(pair.gp_edges)
        _check_simple(r.edges)
        assert density(r.as_pair(pair)) == density(pair)


def test_same_seed_same_edges():
    pair = make_pair(8, TWO_CLIQUES)
    assert randomize_degree_preserving(pair, 99).edges == randomize_degree_preserving(pair, 99).edges


def test_swap_factor_zero_is_identity():
    pair = make_pair(8, TWO_CLIQUES)
    r = randomize_degree_preserving(pair, 1, swap_factor=0)
    assert r.edges == pair.gp_edges and r.attempted_swaps == 0


def test_negative_swap_factor():
    with pytest.raises(ValueError):
        randomize_degree_preserving(make_pair(2, [(0, 1)]), 1, swap_factor=-1)


def test_seed_helpers():
    assert child_seed(0, "A", 0) == child_seed(0, "A", 0)
    assert child_seed(0, "A", 0) != child_seed(0, "A", 1)
    assert 0 <= child_seed(2**64 - 1, "x", 5) < 2**64
    with pytest.raises(ValueError):
        make_rng(-1)


def test_identical_inputs_give_t0_p1():
    pairs = [make_pair(2, [(0, 1)], focal=f"v{i}") for i in range(5)]
    rep = compare_pairs(pairs, samples_per_paper=2, seed=0)
    for c in rep.metrics:
        assert c.test.t_statistic == 0.0
        assert c.test.p_value == 1.0


def test_report_structure():
    pairs = [
        generate_prototype(PrototypeSpec("WithinCommunity", 14, seed=s), focal=f"v{s:02d}") for s in range(50)
    ]
    rep = compare_pairs(pairs, samples_per_paper=10, seed=5, swap_factor=10)
    assert [c.metric for c in rep.metrics] == list(COMPARED_METRICS)
    assert rep.n_papers == 50
    for c in rep.metrics:
        assert c.real.sample_count == 50
        assert c.random.sample_count == 500
        assert sum(c.real.masses) == pytest.approx(1.0)
        assert sum(c.random.masses) == pytest.approx(1.0)
    assert rep.comparison("clustering").test.t_statistic > 0


def test_parallel_matches_serial():
    pairs = [generate_prototype(PrototypeSpec("Brokerage", 15, seed=s), focal=f"v{s}") for s in range(8)]
    a = compare_pairs(pairs, samples_per_paper=2, seed=3, swap_factor=5, jobs=1)
    b = compare_pairs(pairs, samples_per_paper=2, seed=3, swap_factor=5, jobs=2)
    assert a == b


def test_compare_on_graph_and_empty_focal_set():
    g = make_graph([("v", "a"), ("v", "b"), ("v", "c"), ("a", "b"), ("b", "c"), ("w", "a"), ("w", "c")])
    rep = compare_real_vs_random(g, ["v", "w"], samples_per_paper=3, seed=1)
    assert rep.n_papers == 2
    with pytest.raises(ValueError, match="at least 2"):
        compare_real_vs_random(g, ["v"])
    with pytest.raises(ValueError):
        compare_real_vs_random(g, [])
    with pytest.raises(ValueError):
        compare_real_vs_random(g, ["v"], samples_per_paper=0)
