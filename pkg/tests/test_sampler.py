import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare

from maxdeg.counting import DegreeClass, degree_class_weight
from maxdeg.graph import Graph
from maxdeg.oracle import compare_sampler, degree_class_counts, enumerate_configurations, enumerate_graphs
from maxdeg.sampler import (
    ClassBudgetExceeded,
    RestartBudgetExceeded,
    SamplerSpec,
    _assign_degrees,
    _random_pairs,
    _simple_edges,
    batch_map,
    batch_sample,
    class_table,
    default_caps,
    draw_stream,
    enumerate_degree_classes,
    iter_batch,
    sample_configuration,
    sample_graph_given_degrees,
    sample_uniform_graph,
    sample_uniform_multigraph,
)


def _edges(G: Graph) -> bytes:
    return G.edges.tobytes()


def test_default_caps():
    assert default_caps(1000, 3) == (30, 0, 220)
    assert default_caps(10**6, 3) == (64, 0, 6929)
    assert default_caps(20, 3) == (20, 0, 20)


def test_spec_validation():
    with pytest.raises(ClassBudgetExceeded):
        SamplerSpec(10**4, 3)
    with pytest.raises(ValueError):
        SamplerSpec(10, 3, "bogus")
    with pytest.raises(ValueError):
        SamplerSpec(10, 1, "truncated")
    with pytest.raises(ValueError):
        SamplerSpec(100, 3, "truncated", floor_mid=50, cap_mid=10)
    assert SamplerSpec.auto(50, 3).mode == "exact"
    assert SamplerSpec.auto(5000, 3).mode == "truncated"


def test_class_probabilities_follow_weights():
    spec = SamplerSpec(5, 2)
    table = class_table(spec)
    weights = [degree_class_weight(tuple(c)).value for c in table.classes.tolist()]
    total = sum(weights)
    for p, w in zip(table.probabilities(), weights):
        assert p == pytest.approx(float(w / total), rel=1e-12)
    listed = dict((dc.d, w.value) for dc, w in enumerate_degree_classes(5, 2))
    assert sum(listed.values()) == total


def test_truncated_lattice_respects_caps():
    spec = SamplerSpec(400, 3, "truncated", cap_low=5, cap_mid=40)
    classes = class_table(spec).classes
    assert (classes[:, 0] == 0).all()
    assert classes[:, 1].max() <= 5 and classes[:, 2].max() <= 40
    assert ((classes @ np.arange(4)) % 2 == 0).all()
    for _ in range(20):
        G, trace = sample_uniform_graph(spec, 3)
        h = G.degree_histogram() + [0] * 4
        assert h[0] == 0 and h[1] <= 5 and h[2] <= 40


def test_full_restart_weight_times_acceptance_counts_graphs():
    # class weight * P(simple | class) equals the number of simple graphs in the class
    for n, R in [(3, 2), (4, 2), (4, 3)]:
        graphs = degree_class_counts(enumerate_graphs(n, R))
        per_class: dict = {}
        for degs in itertools.product(range(R + 1), repeat=n):
            if sum(degs) % 2:
                continue
            cls = tuple(degs.count(i) for i in range(R + 1))
            table = enumerate_configurations(degs)
            denom = math.prod(math.factorial(d) for d in degs)
            per_class[cls] = per_class.get(cls, Fraction(0)) + Fraction(table.simple_total, denom)
        for cls, mass in per_class.items():
            assert mass == graphs.get(cls, 0), (n, R, cls)


def _within_class_restart(spec: SamplerSpec, rng) -> Graph:
    # redraws the matching only; a class with no simple realisation is redrawn after 200 tries
    while True:
        d = class_table(spec).draw(rng)
        for _ in range(200):
            edges = _simple_edges(_random_pairs(_assign_degrees(d, rng), rng), spec.n)
            if edges is not None:
                return Graph._trusted(spec.n, spec.R, edges)


def test_within_class_restart_is_biased():
    spec = SamplerSpec(3, 2)
    rng = np.random.default_rng(99)
    biased = Counter(_edges(_within_class_restart(spec, rng)) for _ in range(8000))
    fair = Counter(batch_map(spec, 8000, 99, _edges))
    table = enumerate_graphs(3, 2)
    keys = list(table.index())
    assert chisquare([biased[k] for k in keys]).pvalue < 1e-6
    assert chisquare([fair[k] for k in keys]).pvalue > 1e-3


@pytest.mark.parametrize("n,R", [(3, 2), (4, 1), (4, 3)])
def test_small_uniformity(n, R):
    result = compare_sampler(n, R, 20000, seed=n * 10 + R)
    assert result.unknown == 0
    assert result.p_value > 1e-4


def test_determinism_across_workers():
    spec = SamplerSpec(30, 3)
    one = batch_sample(spec, 24, seed=5)
    two = batch_sample(spec, 24, seed=5, workers=2)
    assert [g for g, _ in one] == [g for g, _ in two]
    assert [g for g, _ in one] == list(iter_batch(spec, 24, 5))
    assert batch_map(spec, 24, 5, _edges, workers=2) == [_edges(g) for g, _ in one]
    tail = batch_sample(spec, 4, seed=5, start=20)
    assert [g for g, _ in tail] == [g for g, _ in one[20:]]


def test_trace_rows():
    spec = SamplerSpec(2000, 3, "truncated")
    G, trace = sample_uniform_graph(spec, draw_stream(1, 0))
    assert trace.attempts == trace.restarts + 1
    rows = trace.rows()
    assert [r[1] for r in rows] == list(range(trace.attempts))
    assert [r[2] for r in rows] == [0] * trace.restarts + [1]
    assert rows[-1][0] == str(trace.degree_class)
    assert G.degree_histogram() == list(trace.degree_class.d)


def test_restart_budget():
    spec = SamplerSpec(2000, 3, "truncated", max_restarts=1)
    with pytest.raises(RestartBudgetExceeded):
        for i in range(50):
            sample_uniform_graph(spec, draw_stream(0, i))


def test_given_degrees_and_multigraph():
    G = sample_graph_given_degrees([2, 2, 2, 2], rng=1)
    assert G.degrees[1:].tolist() == [2, 2, 2, 2]
    with pytest.raises(ValueError):
        sample_graph_given_degrees([1, 2])
    with pytest.raises(RestartBudgetExceeded):
        sample_graph_given_degrees([3, 1], max_restarts=5)
    M = sample_uniform_multigraph(SamplerSpec(10, 3), 4)
    assert M.n == 10 and M.degrees.max() <= 3
    C = sample_configuration([1, 2, 3], rng=2)
    assert sorted(x for p in C.matching for x in p) == list(range(6))
