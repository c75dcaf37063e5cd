"""Counts of the rare structures of a bounded-degree graph.

The rare ("Poisson") objects of a graph with maximum degree ``R`` are the
vertices of degree ``R-2``, the short cycles, and the short paths whose two
endpoints both have degree ``R-1``.  :func:`census` counts all of them up to a
length ``m = 5**(k+1)``, measures how far apart they are, and caps the counts
at ``k`` to produce a :class:`StructureProfile`.

Cycles and paths are counted as unoriented objects: a cycle once per vertex
cyclic order up to rotation and reflection, a path once per pair of
orientations.  Paths are vertex-simple and need not be induced.
"""
from __future__ import annotations

import csv
import io
import math
import sys
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .graph import Configuration, Graph, Multigraph, component_sizes, graph_image

DEFAULT_BUDGET = 5_000_000


class CensusBudgetError(RuntimeError):
    """Raised when cycle or path enumeration exceeds its step budget."""


def profile_length(k: int) -> int:
    """Longest cycle/path length tracked at rank ``k``: ``5**(k+1)``."""
    return 5 ** (k + 1)


def separation_threshold(k: int) -> int:
    return 5 ** (k + 2)


# ------------------------------------------------------------------ cycles


class _Budget:
    __slots__ = ("left",)

    def __init__(self, steps: int | None):
        self.left = math.inf if steps is None else steps

    def spend(self, k: int = 1) -> None:
        self.left -= k
        if self.left < 0:
            raise CensusBudgetError("enumeration step budget exhausted")


def iter_cycles(G: Graph, max_len: int, budget: int | None = DEFAULT_BUDGET) -> Iterator[tuple[int, ...]]:
    """Yield every cycle of length ``3..max_len`` once, as a vertex tuple.

    Each cycle is reported from its least vertex ``s`` with second vertex
    smaller than the last, which fixes rotation and reflection.
    """
    adj = G.sorted_adjacency
    spend = _Budget(budget).spend
    limit = sys.getrecursionlimit()
    if max_len + 50 > limit:
        sys.setrecursionlimit(max_len + 100)
    for s in range(1, G.n + 1):
        path = [s]
        on_path = {s}

        def extend():
            u = path[-1]
            for w in adj[u]:
                if w == s:
                    if len(path) >= 3 and path[1] < u:
                        yield tuple(path)
                elif w > s and w not in on_path and len(path) < max_len:
                    spend()
                    path.append(w)
                    on_path.add(w)
                    yield from extend()
                    path.pop()
                    on_path.discard(w)

        yield from extend()


def cycle_counts(G: Graph, max_len: int, budget: int | None = DEFAULT_BUDGET) -> dict[int, int]:
    """Number of ``p``-cycles for every ``3 <= p <= max_len``."""
    counts = {p: 0 for p in range(3, max_len + 1)}
    for cyc in iter_cycles(G, max_len, budget):
        counts[len(cyc)] += 1
    return counts


def _triangles(G: Graph) -> int:
    A = G.csr
    return int((A @ A).multiply(A).sum()) // 6


def _four_cycles(G: Graph) -> int:
    # closed 4-walks = 8 * C4 + 2 * sum(d^2) - 2|E|
    A = G.csr
    A2 = A @ A
    closed4 = int(A2.multiply(A2).sum())
    deg = G.degrees[1:]
    return (closed4 - 2 * int(np.dot(deg, deg)) + 2 * G.num_edges) // 8


def _multigraph_cycles(M: Multigraph, p: int) -> int:
    if p == 1:
        return M.num_loops()
    if p == 2:
        return M.num_double_pairs()
    # p >= 3: cycles of the support weighted by the product of multiplicities
    adj: dict[int, dict[int, int]] = {v: {} for v in range(1, M.n + 1)}
    for key, c in M.multiplicity.items():
        if len(key) == 2:
            u, v = sorted(key)
            adj[u][v] = c
            adj[v][u] = c
    total = 0
    for s in range(1, M.n + 1):
        stack = [(s, (s,), 1)]
        while stack:
            u, path, weight = stack.pop()
            for w, c in adj[u].items():
                if w == s and len(path) == p and path[1] < u:
                    total += weight * c
                elif w > s and w not in path and len(path) < p:
                    stack.append((w, path + (w,), weight * c))
    return total


def count_cycles(G: Graph | Multigraph | Configuration, p: int) -> int:
    """Number of ``p``-cycles, each counted once.

    For multigraphs and configurations, 1-cycles are loops, 2-cycles are pairs
    of parallel edges, and longer cycles are weighted by edge multiplicity.
    """
    if p < 1:
        raise ValueError("cycle length must be at least 1")
    if isinstance(G, Configuration):
        G = graph_image(G)
    if isinstance(G, Multigraph):
        return _multigraph_cycles(G, p)
    if p < 3:
        return 0
    if p == 3:
        return _triangles(G)
    if p == 4:
        return _four_cycles(G)
    return cycle_counts(G, p, budget=None)[p]


# ------------------------------------------------------------------ paths


def iter_degree_paths(
    G: Graph, max_len: int, d: int, budget: int | None = DEFAULT_BUDGET
) -> Iterator[tuple[int, ...]]:
    """Yield vertex-simple paths of length ``1..max_len`` joining two degree-``d`` vertices.

    Each path is reported once, oriented from its smaller endpoint.
    """
    adj = G.sorted_adjacency
    deg = G.degrees
    spend = _Budget(budget).spend
    ends = np.flatnonzero(deg[1:] == d) + 1
    for u in ends.tolist():
        stack = [(u, (u,))]
        while stack:
            v, path = stack.pop()
            if len(path) > 1 and deg[v] == d and u < v:
                yield path
            if len(path) > max_len:
                continue
            seen = set(path)
            for w in adj[v]:
                if w not in seen:
                    spend()
                    stack.append((w, path + (w,)))


def path_counts(G: Graph, max_len: int, d: int, budget: int | None = DEFAULT_BUDGET) -> dict[int, int]:
    counts = {p: 0 for p in range(1, max_len + 1)}
    for path in iter_degree_paths(G, max_len, d, budget):
        counts[len(path) - 1] += 1
    return counts


def count_paths_endpoints_degree(G: Graph, p: int, d: int) -> int:
    """Number of vertex-simple ``p``-edge paths whose endpoints both have degree ``d``."""
    if p < 1:
        raise ValueError("path length must be at least 1")
    deg = G.degrees
    if p == 1:
        e = G.edges
        if not len(e):
            return 0
        return int(np.count_nonzero((deg[e[:, 0]] == d) & (deg[e[:, 1]] == d)))
    return sum(1 for path in iter_degree_paths(G, p, d, budget=None) if len(path) == p + 1)


# ------------------------------------------------------------------ distances


def _voronoi_min_distance(G: Graph, objects: list[tuple[int, ...]]) -> float:
    """Least distance between two distinct objects (vertex sets); ``inf`` if none."""
    if len(objects) < 2:
        return math.inf
    label: dict[int, int] = {}
    dist: dict[int, int] = {}
    queue = deque()
    for idx, obj in enumerate(objects):
        for v in obj:
            if v in label:
                if label[v] != idx:
                    return 0
                continue
            label[v] = idx
            dist[v] = 0
            queue.append(v)
    adj = G.adjacency
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in label:
                label[w] = label[u]
                dist[w] = dist[u] + 1
                queue.append(w)
    best = math.inf
    for u, v in G.edges.tolist():
        lu, lv = label.get(u), label.get(v)
        if lu is not None and lv is not None and lu != lv:
            best = min(best, dist[u] + dist[v] + 1)
    return best


def _min_distance_to_set(G: Graph, sources: Iterable[int], targets: Iterable[int]) -> float:
    sources = set(sources)
    targets = set(targets)
    if not sources or not targets:
        return math.inf
    dist: dict[int, int] = {s: 0 for s in sources}
    queue = deque(sources)
    adj = G.adjacency
    if targets & sources:
        return 0
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                if w in targets:
                    return dist[w]
                queue.append(w)
    return math.inf


def _low_vertex_separation(G: Graph, R: int) -> float:
    deg = G.degrees
    q_vertices = (np.flatnonzero(deg[1:] == R - 2) + 1).tolist()
    low = set((np.flatnonzero(deg[1:] <= R - 1) + 1).tolist())
    best = math.inf
    for v in q_vertices:
        best = min(best, _min_distance_to_set(G, [v], low - {v}))
    return best


# ------------------------------------------------------------------ profile + report


@dataclass(frozen=True)
class StructureProfile:
    """Counts of rare objects capped at ``k``.

    ``r[p - 3]`` holds the capped ``p``-cycle count for ``p = 3..m`` and
    ``s[p - 1]`` the capped count of ``p``-paths between degree-``R-1``
    vertices for ``p = 1..m``, where ``m = 5**(k+1)``.  Entries beyond a
    truncated census are ``None``.
    """

    k: int
    q: int
    r: tuple[int | None, ...]
    s: tuple[int | None, ...]

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        m = self.m
        if len(self.r) != m - 2 or len(self.s) != m:
            raise ValueError(f"profile vectors must cover p up to m={m}")
        for x in (self.q, *self.r, *self.s):
            if x is not None and not 0 <= x <= self.k:
                raise ValueError(f"profile entries must lie in 0..{self.k}")

    @property
    def m(self) -> int:
        return profile_length(self.k)

    @property
    def complete(self) -> bool:
        return None not in self.r and None not in self.s

    def coords(self) -> dict[str, int | None]:
        out: dict[str, int | None] = {"q": self.q}
        out.update({f"r{p}": x for p, x in enumerate(self.r, start=3)})
        out.update({f"s{p}": x for p, x in enumerate(self.s, start=1)})
        return out

    @classmethod
    def zeros(cls, k: int) -> "StructureProfile":
        m = profile_length(k)
        return cls(k, 0, (0,) * (m - 2), (0,) * m)

    @classmethod
    def from_coords(cls, k: int, coords: dict[str, int]) -> "StructureProfile":
        """Build a profile from named coordinates; unnamed ones default to 0."""
        m = profile_length(k)
        r = [0] * (m - 2)
        s = [0] * m
        q = 0
        for name, value in coords.items():
            kind, p = parse_coordinate(name, k)
            if kind == "q":
                q = value
            elif kind == "r":
                r[p - 3] = value
            else:
                s[p - 1] = value
        return cls(k, q, tuple(r), tuple(s))


def parse_coordinate(name: str, k: int) -> tuple[str, int]:
    """Split ``"q"``, ``"r<p>"`` or ``"s<p>"`` and check ``p`` against ``m``."""
    m = profile_length(k)
    if name == "q":
        return "q", 0
    kind, digits = name[:1], name[1:]
    if kind not in ("r", "s") or not digits.isdigit():
        raise ValueError(f"unknown profile coordinate {name!r}")
    p = int(digits)
    lo = 3 if kind == "r" else 1
    if not lo <= p <= m:
        raise ValueError(f"coordinate {name!r} outside {kind}{lo}..{kind}{m}")
    return kind, p


@dataclass
class CensusReport:
    n: int
    R: int
    k: int
    max_length: int
    degree_histogram: list[int]
    cycles: dict[int, int]
    paths: dict[int, int]
    separation: dict[str, float]
    min_component_size: int
    connectivity: int | None = None
    rigid: bool | None = None
    extra: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return profile_length(self.k)

    @property
    def truncated(self) -> bool:
        return self.max_length < self.m

    @property
    def min_separation(self) -> float:
        return min(self.separation.values(), default=math.inf)

    def profile(self) -> StructureProfile:
        cap = self.k
        R = self.R
        q = min(self.degree_histogram[R - 2], cap) if R >= 2 else 0
        r = tuple(min(self.cycles[p], cap) if p <= self.max_length else None for p in range(3, self.m + 1))
        s = tuple(min(self.paths[p], cap) if p <= self.max_length else None for p in range(1, self.m + 1))
        return StructureProfile(self.k, q, r, s)

    def class_conditions(self) -> dict[str, bool]:
        """Truth of each membership condition for the class of :meth:`profile`."""
        R, m = self.R, self.m
        hist = self.degree_histogram
        thr = separation_threshold(self.k)
        cond = {
            "no_low_degree": all(hist[i] == 0 for i in range(0, max(R - 2, 0))),
            "enough_high_degree": all(hist[i] >= m for i in (R - 1, R) if i >= 0),
            "sep_a": self.separation["a"] >= thr,
            "sep_b": self.separation["b"] >= thr,
            "sep_c": self.separation["c"] >= thr,
            "sep_d": self.separation["d"] >= thr,
            "components": R < 3 or self.min_component_size >= m,
        }
        return cond

    def in_class(self, profile: StructureProfile | None = None) -> bool:
        """Whether the graph lies in the structure class indexed by ``profile``.

        Defaults to the graph's own profile.  A truncated census cannot decide
        membership and raises ``ValueError``.
        """
        if self.truncated:
            raise ValueError("membership needs a census up to length m")
        own = self.profile()
        if profile is not None and profile != own:
            return False
        return all(self.class_conditions().values())

    def rows(self) -> list[tuple[str, object]]:
        out: list[tuple[str, object]] = [
            ("n", self.n),
            ("R", self.R),
            ("k", self.k),
            ("m", self.m),
            ("max_length", self.max_length),
        ]
        out += [(f"deg_{i}", c) for i, c in enumerate(self.degree_histogram)]
        out += [(f"cycles_{p}", c) for p, c in sorted(self.cycles.items())]
        out += [(f"paths_{p}", c) for p, c in sorted(self.paths.items())]
        out += [(f"sep_{key}", _fmt(v)) for key, v in sorted(self.separation.items())]
        out.append(("min_component_size", self.min_component_size))
        if self.connectivity is not None:
            out.append(("connectivity", self.connectivity))
        if self.rigid is not None:
            out.append(("rigid", int(self.rigid)))
        if not self.truncated:
            out.append(("in_class", int(self.in_class())))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["stat", "value"])
        w.writerows(self.rows())
        return buf.getvalue()


def _fmt(x: float):
    return "inf" if x == math.inf else int(x)


def census(
    G: Graph,
    k: int,
    max_length: int | None = None,
    *,
    connectivity: bool = False,
    rigidity: bool = False,
    budget: int | None = DEFAULT_BUDGET,
) -> tuple[StructureProfile, CensusReport]:
    """Count rare objects up to length ``m = 5**(k+1)`` and derive the profile.

    ``max_length`` lowers the enumeration length below ``m`` for graphs where
    enumerating every cycle and path up to ``m`` is out of reach; the
    resulting profile then has ``None`` entries past that length.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    R = G.R
    m = profile_length(k)
    L = m if max_length is None else min(max_length, m)
    cycles = {p: 0 for p in range(3, L + 1)}
    cycle_sets = []
    for cyc in iter_cycles(G, L, budget):
        cycles[len(cyc)] += 1
        cycle_sets.append(cyc)
    paths = {p: 0 for p in range(1, L + 1)}
    path_sets = []
    if R >= 1:
        for path in iter_degree_paths(G, L, R - 1, budget):
            paths[len(path) - 1] += 1
            path_sets.append(path)
    deg = G.degrees
    low = (np.flatnonzero(deg[1:] <= R - 1) + 1).tolist()
    separation = {
        "a": _low_vertex_separation(G, R),
        "b": _min_distance_to_set(G, {v for c in cycle_sets for v in c}, low),
        "c": _voronoi_min_distance(G, cycle_sets),
        "d": _voronoi_min_distance(G, path_sets),
    }
    sizes = component_sizes(G)
    report = CensusReport(
        n=G.n,
        R=R,
        k=k,
        max_length=L,
        degree_histogram=G.degree_histogram(),
        cycles=cycles,
        paths=paths,
        separation=separation,
        min_component_size=sizes[0] if sizes else 0,
    )
    if connectivity and G.n >= 2:
        from .connectivity import vertex_connectivity

        report.connectivity = vertex_connectivity(G)
    if rigidity:
        from .automorphism import is_rigid

        report.rigid = is_rigid(G)
    return report.profile(), report
