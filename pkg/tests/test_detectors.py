from __future__ import annotations

import itertools

import pytest

from cmhide import DetectorSpec, Partition, detect, modularity

from conftest import graph_from_edges, random_graph, set_partitions


def brute_modularity(g, partition, resolution=1.0):
    """Direct double-sum over all ordered node pairs."""
    m2 = 2.0 * g.m
    total = 0.0
    for i in range(g.n):
        for j in range(g.n):
            if partition.community_of(i) != partition.community_of(j):
                continue
            a_ij = 1.0 if g.has_edge(i, j) else 0.0
            total += a_ij - resolution * g.degree(i) * g.degree(j) / m2
    return total / m2


def partition_of(blocks) -> Partition:
    return Partition.from_communities(frozenset(b) for b in blocks)


def test_modularity_single_community_is_zero():
    tri = graph_from_edges([(0, 1), (1, 2), (0, 2)])
    assert modularity(tri, partition_of([[0, 1, 2]])) == pytest.approx(0.0, abs=1e-15)


def test_modularity_singletons_on_triangle():
    tri = graph_from_edges([(0, 1), (1, 2), (0, 2)])
    q = modularity(tri, partition_of([[0], [1], [2]]))
    assert q == pytest.approx(-1.0 / 3.0, abs=1e-12)


def test_modularity_matches_double_sum_on_cliques(cliques):
    part = partition_of([range(5), range(5, 10)])
    assert modularity(cliques, part) == pytest.approx(
        brute_modularity(cliques, part), abs=1e-12
    )


def test_greedy_on_karate_finds_three_communities(kar, kar_partition):
    assert kar_partition.k == 3
    assert sorted(len(c) for c in kar_partition.communities) == [8, 9, 17]


def test_greedy_splits_cliques_and_is_exhaustively_optimal(cliques, greedy):
    part = detect(cliques, greedy)
    found = {frozenset(c) for c in part.communities}
    assert found == {frozenset(range(5)), frozenset(range(5, 10))}
    best = max(
        modularity(cliques, partition_of(blocks))
        for blocks in set_partitions(range(10))
    )
    assert modularity(cliques, part) == pytest.approx(best, abs=1e-12)


def test_single_edge_graph_is_degenerate_but_valid():
    g = graph_from_edges([("a", "b")])
    for name in ("greedy", "louvain", "label_propagation"):
        part = detect(g, DetectorSpec(name))
        assert part.k in (1, 2)
        assert sorted(v for c in part.communities for v in c) == [0, 1]


def test_detectors_are_deterministic(kar):
    for name in ("greedy", "louvain", "label_propagation"):
        spec = DetectorSpec(name, seed=13)
        a = detect(kar, spec)
        b = detect(kar, spec)
        assert a == b


def test_louvain_seed_changes_are_isolated(kar):
    parts = [detect(kar, DetectorSpec("louvain", seed=s)) for s in range(4)]
    for p in parts:
        assert sorted(v for c in p.communities for v in c) == list(range(kar.n))
        assert modularity(kar, p) > modularity(
            kar, partition_of([[v] for v in range(kar.n)])
        )


def test_greedy_never_spans_components():
    g = graph_from_edges([(0, 1), (1, 2), (3, 4), (4, 5)])
    part = detect(g, DetectorSpec("greedy"))
    for c in part.communities:
        assert c <= frozenset((0, 1, 2)) or c <= frozenset((3, 4, 5))


def test_partition_helpers(kar_partition):
    c = kar_partition.community_members(0)
    assert 0 in c
    assert kar_partition.community_of(0) == kar_partition.community_of(min(c))
    membership = kar_partition.membership(34)
    assert len(membership) == 34
    for v in c:
        assert membership[v] == membership[0]


def test_partition_rejects_overlap():
    with pytest.raises(ValueError):
        Partition.from_communities([frozenset((0, 1)), frozenset((1, 2))])


def test_unknown_detector_lists_available():
    with pytest.raises(Exception) as err:
        DetectorSpec("walktrap")
    msg = str(err.value)
    assert "greedy" in msg and "louvain" in msg


def test_greedy_matches_exhaustive_max_on_small_graphs():
    for seed, p in ((0, 0.4), (1, 0.55), (2, 0.7)):
        g = random_graph(6, p, seed)
        if g.m == 0:
            continue
        part = detect(g, DetectorSpec("greedy"))
        best = max(
            modularity(g, partition_of(blocks))
            for blocks in set_partitions(range(g.n))
        )
        # agglomerative greedy is a heuristic: never better than the optimum
        assert modularity(g, part) <= best + 1e-12
        assert modularity(g, part) >= modularity(
            g, partition_of([[v] for v in range(g.n)])
        )


def test_detector_spec_validation():
    with pytest.raises(Exception):
        DetectorSpec("greedy", resolution=0.0)
