"""Immutable graph, multigraph and configuration types.

Vertices are the integers ``1..n``.  A :class:`Configuration` is a set of
points partitioned into cells ``W_1..W_n`` together with a perfect matching
on the points; projecting each matched pair onto the cells of its two points
gives a :class:`Multigraph` (the pairing model).
"""
from __future__ import annotations

from collections import Counter, deque
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised when a graph-level contract is violated."""


def _edge_array(n: int, edges) -> np.ndarray:
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    arr = arr.reshape(-1, 2)
    arr = np.sort(arr, axis=1)
    if arr.min() < 1 or arr.max() > n:
        raise GraphError(f"edge endpoint outside 1..{n}")
    if np.any(arr[:, 0] == arr[:, 1]):
        raise GraphError("self-loops are not allowed in a Graph")
    order = np.lexsort((arr[:, 1], arr[:, 0]))
    arr = arr[order]
    if len(arr) > 1 and np.any(np.all(arr[1:] == arr[:-1], axis=1)):
        raise GraphError("duplicate edges are not allowed in a Graph")
    return arr


class Graph:
    """Simple labelled graph on ``1..n`` whose degrees are all at most ``R``.

    The canonical representation is the lexicographically sorted edge array
    with ``u < v`` in every row; adjacency sets and CSR arrays are derived
    lazily.  Instances are immutable and hashable.
    """

    __slots__ = ("n", "R", "edges", "__dict__")

    def __init__(self, n: int, R: int, edges: Iterable[Sequence[int]] | np.ndarray = ()):
        if n < 0:
            raise GraphError("n must be non-negative")
        if R < 0:
            raise GraphError("R must be non-negative")
        self.n = int(n)
        self.R = int(R)
        arr = _edge_array(self.n, list(edges) if not isinstance(edges, np.ndarray) else edges)
        arr.setflags(write=False)
        self.edges = arr
        deg = self.degrees
        if self.n and deg[1:].max(initial=0) > self.R:
            v = int(np.argmax(deg))
            raise GraphError(f"vertex {v} has degree {deg[v]} > R={self.R}")

    @classmethod
    def _trusted(cls, n: int, R: int, edges: np.ndarray) -> "Graph":
        # edges already canonical: sorted rows, u < v, no duplicates, degree-checked
        g = object.__new__(cls)
        g.n = n
        g.R = R
        edges.setflags(write=False)
        g.edges = edges
        return g

    @cached_property
    def degrees(self) -> np.ndarray:
        """Degree array indexed by vertex; entry 0 is unused and zero."""
        deg = np.zeros(self.n + 1, dtype=np.int64)
        if len(self.edges):
            np.add.at(deg, self.edges[:, 0], 1)
            np.add.at(deg, self.edges[:, 1], 1)
        return deg

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        """``adjacency[v]`` is the neighbour set of ``v``; index 0 is empty."""
        nbrs: list[list[int]] = [[] for _ in range(self.n + 1)]
        for u, v in self.edges.tolist():
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(frozenset(x) for x in nbrs)

    @cached_property
    def sorted_adjacency(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(sorted(s)) for s in self.adjacency)

    @cached_property
    def csr(self):
        """Symmetric 0/1 adjacency as a scipy CSR matrix over ``0..n-1``."""
        from scipy.sparse import csr_matrix

        e = self.edges - 1
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        data = np.ones(len(rows), dtype=np.int64)
        return csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return int(self.degrees[v])

    def neighbors(self, v: int) -> frozenset[int]:
        self._check_vertex(v)
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def degree_histogram(self) -> list[int]:
        """Counts ``[d_0, ..., d_R]`` of vertices per degree."""
        return np.bincount(self.degrees[1:], minlength=self.R + 1).tolist()

    def edge_list(self) -> list[tuple[int, int]]:
        return [tuple(e) for e in self.edges.tolist()]

    def relabel(self, perm: Mapping[int, int] | Sequence[int]) -> "Graph":
        """Image of the graph under the vertex bijection ``v -> perm[v]``.

        A sequence is read with ``perm[v - 1]`` as the image of ``v``.
        """
        if isinstance(perm, Mapping):
            table = np.array([0] + [perm[v] for v in self.vertices()], dtype=np.int64)
        else:
            table = np.array([0, *perm], dtype=np.int64)
        if sorted(table[1:].tolist()) != list(self.vertices()):
            raise GraphError("relabelling must be a permutation of 1..n")
        return Graph(self.n, self.R, table[self.edges] if len(self.edges) else ())

    def _check_vertex(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise GraphError(f"vertex {v} outside 1..{self.n}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.R == other.R
            and self.edges.shape == other.edges.shape
            and bool(np.array_equal(self.edges, other.edges))
        )

    def __hash__(self) -> int:
        return hash((self.n, self.R, self.edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, R={self.R}, edges={self.edge_list()})"

    def __getstate__(self):
        return {"n": self.n, "R": self.R, "edges": np.array(self.edges)}

    def __setstate__(self, state):
        self.n = state["n"]
        self.R = state["R"]
        edges = state["edges"]
        edges.setflags(write=False)
        self.edges = edges


class Multigraph:
    """Multigraph on ``1..n`` given by edge multiplicities.

    ``multiplicity`` maps ``frozenset({v})`` (loops) and ``frozenset({v, w})``
    to positive counts.  A loop contributes 2 to the degree of its vertex.
    """

    __slots__ = ("n", "multiplicity", "__dict__")

    def __init__(self, n: int, multiplicity: Mapping[frozenset, int]):
        self.n = int(n)
        clean = {}
        for key, count in multiplicity.items():
            key = frozenset(key)
            if not 1 <= len(key) <= 2 or not all(1 <= v <= self.n for v in key):
                raise GraphError(f"bad multigraph key {sorted(key)}")
            if count < 0:
                raise GraphError("multiplicities must be non-negative")
            if count:
                clean[key] = int(count)
        self.multiplicity = clean

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n + 1, dtype=np.int64)
        for key, count in self.multiplicity.items():
            if len(key) == 1:
                (v,) = key
                deg[v] += 2 * count
            else:
                for v in key:
                    deg[v] += count
        return deg

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    def num_loops(self) -> int:
        """Number of 1-cycles."""
        return sum(c for k, c in self.multiplicity.items() if len(k) == 1)

    def num_double_pairs(self) -> int:
        """Number of 2-cycles: unordered pairs of parallel edges."""
        return sum(c * (c - 1) // 2 for k, c in self.multiplicity.items() if len(k) == 2)

    def is_simple(self) -> bool:
        return all(len(k) == 2 and c == 1 for k, c in self.multiplicity.items())

    def to_graph(self, R: int | None = None) -> Graph:
        """Convert to a :class:`Graph`; raises :class:`GraphError` if not simple."""
        if not self.is_simple():
            raise GraphError("multigraph has loops or multiple edges")
        if R is None:
            R = int(self.degrees.max(initial=0))
        return Graph(self.n, R, [sorted(k) for k in self.multiplicity])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multigraph):
            return NotImplemented
        return self.n == other.n and self.multiplicity == other.multiplicity

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.multiplicity.items())))

    def __repr__(self) -> str:
        items = sorted((tuple(sorted(k)), c) for k, c in self.multiplicity.items())
        return f"Multigraph(n={self.n}, {items})"


def is_simple(M: Multigraph) -> bool:
    return M.is_simple()


class Configuration:
    """Cells ``W_1..W_n`` of points plus a perfect matching on all points.

    Points are numbered ``0..2m-1`` consecutively cell by cell, so the cell of
    a point is determined by the cell sizes alone.
    """

    __slots__ = ("cell_sizes", "matching", "__dict__")

    def __init__(self, cell_sizes: Sequence[int], matching: Iterable[Sequence[int]]):
        sizes = tuple(int(s) for s in cell_sizes)
        if any(s < 0 for s in sizes):
            raise GraphError("cell sizes must be non-negative")
        total = sum(sizes)
        if total % 2:
            raise GraphError("total number of points must be even")
        pairs = tuple(sorted(tuple(sorted((int(a), int(b)))) for a, b in matching))
        seen = [p for pair in pairs for p in pair]
        if len(pairs) * 2 != total or sorted(seen) != list(range(total)):
            raise GraphError("matching must pair every point exactly once")
        self.cell_sizes = sizes
        self.matching = pairs

    @property
    def n(self) -> int:
        return len(self.cell_sizes)

    @property
    def two_m(self) -> int:
        return sum(self.cell_sizes)

    @cached_property
    def owner(self) -> np.ndarray:
        """``owner[point]`` is the 1-based cell containing that point."""
        return np.repeat(np.arange(1, self.n + 1), self.cell_sizes)

    def cells(self) -> list[tuple[int, ...]]:
        out, start = [], 0
        for s in self.cell_sizes:
            out.append(tuple(range(start, start + s)))
            start += s
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.cell_sizes == other.cell_sizes and self.matching == other.matching

    def __hash__(self) -> int:
        return hash((self.cell_sizes, self.matching))

    def __repr__(self) -> str:
        return f"Configuration(cells={self.cell_sizes}, matching={self.matching})"


def graph_image(C: Configuration) -> Multigraph:
    """Project a configuration onto its multigraph image."""
    owner = C.owner
    counts = Counter(frozenset((int(owner[a]), int(owner[b]))) for a, b in C.matching)
    return Multigraph(C.n, counts)


def ball(G: Graph, v: int, radius: int) -> frozenset[int]:
    """Vertices at distance at most ``radius`` from ``v`` (``v`` included)."""
    G._check_vertex(v)
    if radius < 0:
        raise GraphError("radius must be non-negative")
    return frozenset(bfs_distances(G, [v], cutoff=radius))


def bfs_distances(G: Graph, sources: Iterable[int], cutoff: int | None = None) -> dict[int, int]:
    """Multi-source BFS distances, optionally truncated at ``cutoff``."""
    adj = G.adjacency
    dist = {s: 0 for s in sources}
    queue = deque(dist)
    while queue:
        u = queue.popleft()
        du = dist[u]
        if cutoff is not None and du >= cutoff:
            continue
        for w in adj[u]:
            if w not in dist:
                dist[w] = du + 1
                queue.append(w)
    return dist


def components(G: Graph) -> list[list[int]]:
    """Connected components as sorted vertex lists, ordered by least vertex."""
    from scipy.sparse.csgraph import connected_components

    if G.n == 0:
        return []
    _, labels = connected_components(G.csr, directed=False)
    groups: dict[int, list[int]] = {}
    for v, lab in enumerate(labels.tolist(), start=1):
        groups.setdefault(lab, []).append(v)
    return sorted(groups.values(), key=lambda c: c[0])


def component_sizes(G: Graph) -> list[int]:
    """Sizes of the connected components, sorted ascending."""
    from scipy.sparse.csgraph import connected_components

    if G.n == 0:
        return []
    _, labels = connected_components(G.csr, directed=False)
    return sorted(np.bincount(labels).tolist())


# ---------------------------------------------------------------- text format


def format_graph(G: Graph) -> str:
    """Serialise as ``"n R"`` followed by one ``"u v"`` line per edge."""
    lines = [f"{G.n} {G.R}"]
    lines.extend(f"{u} {v}" for u, v in G.edges.tolist())
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    """Inverse of :func:`format_graph`.  Blank lines and ``#`` comments are skipped."""
    rows = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    rows = [r for r in rows if r]
    if not rows:
        raise GraphError("empty graph text")
    try:
        n, R = (int(x) for x in rows[0].split())
        edges = [tuple(int(x) for x in r.split()) for r in rows[1:]]
    except ValueError as exc:
        raise GraphError(f"malformed graph text: {exc}") from None
    if any(len(e) != 2 for e in edges):
        raise GraphError("each edge line must hold exactly two vertices")
    if any(u >= v for u, v in edges):
        raise GraphError("edge lines must satisfy u < v")
    return Graph(n, R, edges)


def iter_graphs(text: str) -> Iterator[Graph]:
    """Parse a stream of graphs separated by blank lines."""
    block: list[str] = []
    for line in text.splitlines():
        if line.strip():
            block.append(line)
        elif block:
            yield parse_graph("\n".join(block))
            block = []
    if block:
        yield parse_graph("\n".join(block))


def read_graph(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def write_graph(G: Graph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_graph(G))


# ---------------------------------------------------------------- small builders


def cycle_graph(n: int, R: int = 2) -> Graph:
    return Graph(n, R, [(i, i % n + 1) for i in range(1, n + 1)] if n >= 3 else [])


def path_graph(n: int, R: int = 2) -> Graph:
    return Graph(n, R, [(i, i + 1) for i in range(1, n)])


def complete_graph(n: int, R: int | None = None) -> Graph:
    R = max(n - 1, 0) if R is None else R
    return Graph(n, R, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


def empty_graph(n: int, R: int = 0) -> Graph:
    return Graph(n, R, [])


def disjoint_union(G: Graph, H: Graph) -> Graph:
    shifted = H.edges + G.n if len(H.edges) else np.zeros((0, 2), dtype=np.int64)
    return Graph(G.n + H.n, max(G.R, H.R), np.vstack([G.edges, shifted]))
