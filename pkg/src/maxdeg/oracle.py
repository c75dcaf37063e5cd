"""Brute-force ground truth for tiny graphs and configurations.

Nothing here is clever on purpose: these tables back the exact expected values
used by the tests and by ``maxdeg oracle``.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy.stats import chisquare

from .graph import Configuration, Graph, Multigraph, format_graph, graph_image, is_simple

DEFAULT_GRAPH_CAP = 7
HARD_GRAPH_CAP = 8
CONFIGURATION_POINT_CAP = 12
UNLABELLED_CAP = 7


class OracleCapError(ValueError):
    pass


# ------------------------------------------------------------------ labelled graphs


def _all_pairs(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(1, n + 1), 2))


def iter_graph_edge_sets(n: int, R: int) -> Iterator[tuple[tuple[int, int], ...]]:
    """Edge sets with maximum degree at most ``R``, in lexicographic order.

    A set ``A`` precedes ``B`` when the sorted edge tuple of ``A`` is smaller.
    """
    pairs = _all_pairs(n)
    deg = [0] * (n + 1)
    chosen: list[tuple[int, int]] = []

    def rec(start: int):
        yield tuple(chosen)
        for i in range(start, len(pairs)):
            u, v = pairs[i]
            if deg[u] < R and deg[v] < R:
                deg[u] += 1
                deg[v] += 1
                chosen.append((u, v))
                yield from rec(i + 1)
                chosen.pop()
                deg[u] -= 1
                deg[v] -= 1

    yield from rec(0)


def count_graphs_bruteforce(n: int, R: int) -> int:
    """Independent recount: scan every edge subset bitmask without pruning."""
    pairs = np.array(_all_pairs(n), dtype=np.int64).reshape(-1, 2)
    total = 0
    masks = np.arange(1 << len(pairs), dtype=np.int64)
    for lo in range(0, len(masks), 1 << 16):
        block = masks[lo : lo + (1 << 16)]
        bits = (block[:, None] >> np.arange(len(pairs))) & 1
        deg = np.zeros((len(block), n + 1), dtype=np.int64)
        for j, (u, v) in enumerate(pairs):
            deg[:, u] += bits[:, j]
            deg[:, v] += bits[:, j]
        total += int(np.count_nonzero(deg.max(axis=1, initial=0) <= R))
    return total


@dataclass
class EnsembleTable:
    """Every graph on vertices ``1..n`` with maximum degree at most ``R``."""

    n: int
    R: int
    graphs: list[Graph]
    _stats: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.graphs)

    def statistic(self, name: str, fn: Callable[[Graph], object]) -> list:
        """Values of ``fn`` on every graph, cached under ``name``."""
        if name not in self._stats:
            self._stats[name] = [fn(G) for G in self.graphs]
        return self._stats[name]

    def index(self) -> dict[bytes, int]:
        return {G.edges.tobytes(): i for i, G in enumerate(self.graphs)}

    def dump(self) -> str:
        """Graphs in the plain text graph format, separated by blank lines."""
        return "\n".join(format_graph(G) for G in self.graphs)


def enumerate_graphs(n: int, R: int, cap: int = DEFAULT_GRAPH_CAP) -> EnsembleTable:
    if n < 1 or R < 0:
        raise ValueError("enumerate_graphs needs n >= 1 and R >= 0")
    if n > min(cap, HARD_GRAPH_CAP):
        raise OracleCapError(f"n = {n} exceeds the enumeration cap {min(cap, HARD_GRAPH_CAP)}")
    graphs = [Graph._trusted(n, R, np.array(es, dtype=np.int64).reshape(-1, 2)) for es in iter_graph_edge_sets(n, R)]
    return EnsembleTable(n, R, graphs)


def exact_statistic_distribution(
    n: int,
    R: int,
    statistic: Callable[[Graph], int],
    cap: int = DEFAULT_GRAPH_CAP,
    table: EnsembleTable | None = None,
) -> dict[int, Fraction]:
    """Exact pmf of ``statistic`` under the uniform distribution on the ensemble."""
    table = table or enumerate_graphs(n, R, cap)
    counts = Counter(statistic(G) for G in table.graphs)
    total = len(table)
    return {v: Fraction(c, total) for v, c in sorted(counts.items())}


def format_pmf_csv(pmf: dict) -> str:
    lines = ["value,probability_num,probability_den"]
    for v, p in sorted(pmf.items()):
        p = Fraction(p)
        lines.append(f"{v},{p.numerator},{p.denominator}")
    return "\n".join(lines) + "\n"


def degree_class_counts(table: EnsembleTable) -> dict[tuple[int, ...], int]:
    """Number of graphs in each degree class ``(d_0..d_R)``."""
    out: Counter = Counter()
    for G in table.graphs:
        out[tuple(G.degree_histogram())] += 1
    return dict(out)


# ------------------------------------------------------------------ unlabelled graphs


@dataclass(frozen=True)
class _PermCodes:
    n: int
    pairs: list[tuple[int, int]]
    # bit position of each pair after relabelling, one row per permutation
    image: np.ndarray


def _perm_codes(n: int) -> _PermCodes:
    pairs = _all_pairs(n)
    pos = {p: i for i, p in enumerate(pairs)}
    rows = []
    for perm in itertools.permutations(range(1, n + 1)):
        row = []
        for u, v in pairs:
            a, b = perm[u - 1], perm[v - 1]
            row.append(pos[(a, b) if a < b else (b, a)])
        rows.append(row)
    return _PermCodes(n, pairs, np.array(rows, dtype=np.int64).reshape(len(rows), len(pairs)))


def canonical_code(G: Graph, codes: _PermCodes | None = None) -> int:
    """Minimum adjacency bit-encoding over all vertex permutations."""
    if G.n > UNLABELLED_CAP:
        raise OracleCapError(f"n = {G.n} exceeds the canonical-form cap {UNLABELLED_CAP}")
    codes = codes or _perm_codes(G.n)
    pos = {p: i for i, p in enumerate(codes.pairs)}
    idx = [pos[(int(u), int(v))] for u, v in G.edges]
    if not idx:
        return 0
    bits = np.left_shift(np.int64(1), codes.image[:, idx]).sum(axis=1)
    return int(bits.min())


def count_unlabelled(n: int, R: int, table: EnsembleTable | None = None) -> int:
    """Number of isomorphism classes in the ensemble."""
    if n > UNLABELLED_CAP:
        raise OracleCapError(f"n = {n} exceeds the unlabelled cap {UNLABELLED_CAP}")
    table = table or enumerate_graphs(n, R)
    codes = _perm_codes(n)
    return len({canonical_code(G, codes) for G in table.graphs})


# ------------------------------------------------------------------ configurations


def iter_matchings(points: Sequence[int]) -> Iterator[list[tuple[int, int]]]:
    """All perfect matchings of ``points``; the first point pairs with each other in turn."""
    pts = list(points)
    if not pts:
        yield []
        return
    first, rest = pts[0], pts[1:]
    for i, partner in enumerate(rest):
        for tail in iter_matchings(rest[:i] + rest[i + 1 :]):
            yield [(first, partner)] + tail


@dataclass
class ConfigurationTable:
    cell_sizes: tuple[int, ...]
    total: int
    by_image: dict[Multigraph, int]

    @property
    def simple_images(self) -> dict[Multigraph, int]:
        return {M: c for M, c in self.by_image.items() if is_simple(M)}

    @property
    def simple_total(self) -> int:
        return sum(self.simple_images.values())

    def preimages(self, G: Graph) -> int:
        key = Multigraph(G.n, {frozenset((int(u), int(v))): 1 for u, v in G.edges})
        return self.by_image.get(key, 0)


def enumerate_configurations(
    cell_sizes: Sequence[int], cap: int = CONFIGURATION_POINT_CAP
) -> ConfigurationTable:
    """Every perfect matching of the points, grouped by multigraph image."""
    sizes = tuple(int(s) for s in cell_sizes)
    if any(s < 0 for s in sizes):
        raise ValueError("cell sizes must be non-negative")
    two_m = sum(sizes)
    if two_m % 2:
        raise ValueError("total number of points must be even")
    if two_m > cap:
        raise OracleCapError(f"{two_m} points exceed the configuration cap {cap}")
    by_image: Counter = Counter()
    total = 0
    for matching in iter_matchings(range(two_m)):
        by_image[graph_image(Configuration(sizes, matching))] += 1
        total += 1
    return ConfigurationTable(sizes, total, dict(by_image))


@lru_cache(maxsize=None)
def count_matchings_bruteforce(two_m: int) -> int:
    if two_m > CONFIGURATION_POINT_CAP:
        raise OracleCapError(f"{two_m} points exceed the configuration cap {CONFIGURATION_POINT_CAP}")
    return sum(1 for _ in iter_matchings(range(two_m)))


def configuration_mass_by_class(n: int, R: int) -> dict[tuple[int, ...], Fraction]:
    """Class weights by brute force.

    For each class, sum over every labelled assignment of degrees to vertices
    the number of enumerated matchings on its points divided by
    ``prod deg(v)!``.
    """
    out: dict[tuple[int, ...], Fraction] = {}
    for degs in itertools.product(range(R + 1), repeat=n):
        if sum(degs) % 2:
            continue
        cls = tuple(degs.count(i) for i in range(R + 1))
        denom = math.prod(math.factorial(d) for d in degs)
        out[cls] = out.get(cls, Fraction(0)) + Fraction(count_matchings_bruteforce(sum(degs)), denom)
    return out


# ------------------------------------------------------------------ sampler comparison


def _edge_key(G: Graph) -> bytes:
    return G.edges.tobytes()


@dataclass(frozen=True)
class SamplerComparison:
    n: int
    R: int
    samples: int
    graphs: int
    p_value: float
    tv: float
    unknown: int

    def passed(self, alpha: float = 1e-3, max_tv: float = 0.02) -> bool:
        return self.unknown == 0 and self.p_value > alpha and self.tv < max_tv


def compare_sampler(n: int, R: int, samples: int, seed: int, workers: int = 1) -> SamplerComparison:
    """Exact-mode draws against the uniform distribution on the enumerated ensemble."""
    from .sampler import SamplerSpec, batch_map

    table = enumerate_graphs(n, R)
    index = table.index()
    keys = batch_map(SamplerSpec(n, R, "exact"), samples, seed, _edge_key, workers)
    counts = np.zeros(len(table), dtype=np.int64)
    unknown = 0
    for k in keys:
        i = index.get(k)
        if i is None:
            unknown += 1
        else:
            counts[i] += 1
    expected = np.full(len(table), samples / len(table))
    p_value = float(chisquare(counts, expected).pvalue) if len(table) > 1 else 1.0
    tv = 0.5 * float(np.abs(counts / samples - 1 / len(table)).sum())
    return SamplerComparison(n, R, samples, len(table), p_value, tv, unknown)
