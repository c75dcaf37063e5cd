from fractions import Fraction

import pytest
from scipy.stats import poisson

from maxdeg.graph import Graph, Multigraph, cycle_graph, iter_graphs, parse_graph
from maxdeg.oracle import (
    OracleCapError,
    canonical_code,
    compare_sampler,
    count_graphs_bruteforce,
    count_unlabelled,
    enumerate_configurations,
    enumerate_graphs,
    exact_statistic_distribution,
    format_pmf_csv,
    iter_matchings,
)


def zeros(G: Graph) -> int:
    return G.degree_histogram()[0]


@pytest.mark.parametrize(
    "R,counts",
    [
        (1, [1, 2, 4, 10, 26, 76, 232]),
        (2, [1, 2, 8, 41, 253, 1858, 15796]),
        (3, [1, 2, 8, 64, 768, 12068]),
    ],
)
def test_labelled_counts(R, counts):
    for n, expected in enumerate(counts, start=1):
        assert len(enumerate_graphs(n, R)) == expected


def test_enumeration_agrees_with_unpruned_recount():
    for n in range(1, 7):
        for R in range(0, n):
            assert len(enumerate_graphs(n, R)) == count_graphs_bruteforce(n, R)
    assert count_graphs_bruteforce(5, 4) == 2**10


def test_enumeration_is_lexicographic_and_distinct():
    table = enumerate_graphs(4, 2)
    keys = [tuple(G.edge_list()) for G in table.graphs]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)
    assert all(max(G.degrees) <= 2 for G in table.graphs)


def test_caps():
    with pytest.raises(OracleCapError):
        enumerate_graphs(9, 2)
    with pytest.raises(OracleCapError):
        enumerate_graphs(8, 2, cap=7)
    with pytest.raises(OracleCapError):
        enumerate_configurations([3, 3, 3, 3, 2])


def test_unlabelled_counts():
    assert [count_unlabelled(n, 2) for n in range(1, 7)] == [1, 2, 4, 7, 11, 19]
    assert [count_unlabelled(n, 1) for n in range(1, 7)] == [1, 2, 2, 3, 3, 4]
    assert [count_unlabelled(n, n - 1) for n in range(2, 6)] == [2, 4, 11, 34]
    assert canonical_code(cycle_graph(4)) == canonical_code(cycle_graph(4).relabel([2, 4, 1, 3]))


def test_degree_zero_pmf():
    pmf = exact_statistic_distribution(3, 2, zeros)
    assert pmf == {0: Fraction(1, 2), 1: Fraction(3, 8), 3: Fraction(1, 8)}
    assert format_pmf_csv(pmf) == "value,probability_num,probability_den\n0,1,2\n1,3,8\n3,1,8\n"


def test_isolated_vertex_law_drifts_towards_poisson():
    def tv(n):
        pmf = exact_statistic_distribution(n, 2, zeros)
        head = sum(abs(float(pmf.get(x, 0)) - poisson.pmf(x, 1)) for x in range(n + 1))
        return 0.5 * (head + poisson.sf(n, 1))

    distances = [tv(n) for n in range(4, 8)]
    assert all(b < a for a, b in zip(distances, distances[1:]))


def test_configurations():
    table = enumerate_configurations([2, 2, 2])
    assert table.total == 15 and table.simple_total == 8
    assert table.preimages(cycle_graph(3)) == 8
    assert len(list(iter_matchings(range(6)))) == 15
    lop = enumerate_configurations([2])
    assert lop.total == 1 and lop.simple_total == 0
    assert list(lop.by_image) == [Multigraph(1, {frozenset({1}): 1})]


def test_preimages_are_degree_factorial_products():
    cells = (1, 2, 3, 2)
    table = enumerate_configurations(cells)
    for M, count in table.simple_images.items():
        assert count == 1 * 2 * 6 * 2


def test_dump_round_trips():
    table = enumerate_graphs(3, 2)
    assert list(iter_graphs(table.dump())) == table.graphs
    assert parse_graph(table.dump().split("\n\n")[0]) == Graph(3, 2, [])


def test_compare_sampler_small():
    result = compare_sampler(3, 2, 4000, seed=1)
    assert result.graphs == 8 and result.unknown == 0
    assert result.passed(alpha=1e-4, max_tv=0.05)
