import itertools
import math
import random

import pytest

from fo_corpus import all_graphs, random_graph
from maxdeg.census import (
    CensusBudgetError,
    StructureProfile,
    _voronoi_min_distance,
    census,
    count_cycles,
    count_paths_endpoints_degree,
    cycle_counts,
    iter_cycles,
    parse_coordinate,
    path_counts,
    profile_length,
)
from maxdeg.graph import Configuration, Graph, Multigraph, bfs_distances, complete_graph, cycle_graph, disjoint_union, path_graph


def brute_cycles(G: Graph, p: int) -> int:
    closed = 0
    for seq in itertools.permutations(range(1, G.n + 1), p):
        if all(G.has_edge(seq[i], seq[(i + 1) % p]) for i in range(p)):
            closed += 1
    return closed // (2 * p)


def brute_paths(G: Graph, p: int, d: int) -> int:
    found = 0
    for seq in itertools.permutations(range(1, G.n + 1), p + 1):
        if G.degree(seq[0]) == d and G.degree(seq[-1]) == d and all(
            G.has_edge(a, b) for a, b in zip(seq, seq[1:])
        ):
            found += 1
    return found // 2


def test_known_cycle_counts():
    K4 = complete_graph(4)
    assert cycle_counts(K4, 4) == {3: 4, 4: 3}
    K5 = complete_graph(5)
    assert [count_cycles(K5, p) for p in (3, 4, 5)] == [10, 15, 12]
    assert count_cycles(cycle_graph(7), 7) == 1
    assert count_cycles(path_graph(5), 3) == 0
    assert count_cycles(K4, 2) == 0


def test_cycles_exhaustive_small():
    for n in range(3, 6):
        for G in all_graphs(n):
            counts = cycle_counts(G, n)
            for p in range(3, n + 1):
                assert counts[p] == brute_cycles(G, p) == count_cycles(G, p)


def test_cycles_random_graphs():
    rng = random.Random(11)
    for _ in range(40):
        G = random_graph(rng, 8, 0.45, R=4)
        counts = cycle_counts(G, 6)
        for p in range(3, 7):
            assert counts[p] == brute_cycles(G, p)


def test_each_cycle_reported_once():
    G = complete_graph(5)
    seen = [frozenset(c) for c in iter_cycles(G, 5) if len(c) == 5]
    assert len(seen) == 12 and len(set(seen)) == 1


def test_paths_exhaustive_small():
    for n in range(2, 6):
        for G in all_graphs(n):
            for d in (1, 2):
                counts = path_counts(G, n - 1, d)
                for p in range(1, n):
                    assert counts[p] == brute_paths(G, p, d) == count_paths_endpoints_degree(G, p, d)


def test_paths_need_not_be_induced():
    # a path between the two degree-2 vertices of a triangle-with-tail still counts when a chord exists
    G = Graph(4, 3, [(1, 2), (2, 3), (1, 3), (3, 4)])
    assert count_paths_endpoints_degree(G, 1, 2) == 1
    assert count_paths_endpoints_degree(G, 2, 2) == 1


def test_budget():
    with pytest.raises(CensusBudgetError):
        cycle_counts(complete_graph(9), 9, budget=100)


def test_multigraph_cycles():
    M = Multigraph(3, {frozenset({1}): 2, frozenset({1, 2}): 2, frozenset({2, 3}): 1, frozenset({1, 3}): 3})
    assert count_cycles(M, 1) == 2
    assert count_cycles(M, 2) == 1 + 3
    assert count_cycles(M, 3) == 2 * 1 * 3
    C = Configuration((2, 2, 2), [(0, 2), (1, 4), (3, 5)])
    assert count_cycles(C, 3) == 1 and count_cycles(C, 1) == 0


def test_voronoi_distance_matches_pairwise():
    rng = random.Random(5)
    for _ in range(30):
        G = random_graph(rng, 14, 0.18, R=3)
        objects = [tuple(rng.sample(range(1, 15), rng.randint(1, 3))) for _ in range(rng.randint(2, 4))]
        best = math.inf
        for a, b in itertools.combinations(objects, 2):
            dist = bfs_distances(G, list(a))
            best = min([best] + [dist[v] for v in b if v in dist])
        assert _voronoi_min_distance(G, objects) == best


def test_profile_and_membership():
    G = disjoint_union(cycle_graph(3), cycle_graph(200))
    prof, rep = census(G, k=1)
    assert profile_length(1) == 25 and rep.m == 25
    assert prof.q == 0 and prof.coords()["r3"] == 1
    assert all(x == 0 for p, x in prof.coords().items() if p not in ("r3", "q"))
    assert rep.cycles[3] == 1 and rep.separation["c"] == math.inf
    # only 3 vertices per small cycle component, but R=2 ignores component sizes
    assert rep.class_conditions()["components"]
    assert not rep.class_conditions()["enough_high_degree"]
    assert not rep.in_class()


def test_profile_caps_at_k():
    G = cycle_graph(3)
    for _ in range(3):
        G = disjoint_union(G, cycle_graph(3))
    prof, rep = census(G, k=2, max_length=5)
    assert rep.cycles[3] == 4 and prof.r[0] == 2
    assert rep.truncated and prof.r[-1] is None and not prof.complete
    with pytest.raises(ValueError):
        rep.in_class()


def test_csv_rows():
    prof, rep = census(cycle_graph(30), k=1, connectivity=True, rigidity=True)
    text = rep.to_csv()
    assert text.startswith("stat,value\n")
    rows = dict(line.split(",") for line in text.strip().splitlines()[1:])
    assert rows["cycles_25"] == "0" and rows["connectivity"] == "2" and rows["rigid"] == "0"
    assert rows["sep_a"] == "inf"


def test_structure_profile_validation():
    with pytest.raises(ValueError):
        StructureProfile(1, 2, (0,) * 23, (0,) * 25)
    with pytest.raises(ValueError):
        StructureProfile(1, 0, (0,) * 3, (0,) * 25)
    p = StructureProfile.from_coords(2, {"q": 1, "r4": 2, "s7": 1})
    assert p.coords()["r4"] == 2 and p.coords()["s7"] == 1 and p.q == 1
    assert parse_coordinate("s125", 2) == ("s", 125)
    for bad in ("r2", "s0", "r126", "t3", "rx"):
        with pytest.raises(ValueError):
            parse_coordinate(bad, 2)
