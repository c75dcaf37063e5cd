"""Uniform sampling of graphs with maximum degree ``R`` via the pairing model.

One attempt of the pipeline:

1. draw a degree class ``(d_0..d_R)`` with probability proportional to its
   configuration weight ``multinomial * M(2m) / prod (i!)^{d_i}``;
2. hand the degrees to the vertices by a uniform random arrangement;
3. pair the points uniformly at random;
4. project onto the multigraph image.

A non-simple image restarts the whole pipeline from step 1.  Every simple
graph ``G`` has exactly ``prod deg(v)!`` preimages, which cancels the
``1 / prod (i!)^{d_i}`` in its class weight, so an accepted attempt is uniform
over all graphs admitted by the class lattice.  Restarting only the matching
would keep the class drawn in step 1 and bias the class frequencies, because
the chance of a simple image differs between classes.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy.special import gammaln

from .counting import DegreeClass, ExactWeight, degree_class_weight
from .graph import Configuration, Graph, Multigraph

EXACT_CLASS_BUDGET = 10_000_000
DEFAULT_MAX_RESTARTS = 10_000


class SamplerError(RuntimeError):
    """Base class for sampler failures."""


class RestartBudgetExceeded(SamplerError):
    """The rejection loop ran out of restarts (spec infeasible or nearly so)."""


class ClassBudgetExceeded(SamplerError, ValueError):
    """The exact degree-class lattice is larger than the configured budget."""


def default_caps(n: int, R: int) -> tuple[int, int, int]:
    """Default ``(cap_low, floor_mid, cap_mid)`` for the truncated lattice."""
    cap_low = max(30, math.ceil(2 * n ** 0.25))
    cap_mid = math.ceil(4 * math.sqrt(R * n))
    return min(cap_low, n), 0, min(cap_mid, n)


@dataclass(frozen=True)
class SamplerSpec:
    """What to sample.

    ``mode="exact"`` weighs every degree class and is exactly uniform on all
    graphs with ``n`` vertices and maximum degree ``R``.  ``mode="truncated"``
    keeps only classes with no vertex of degree below ``R-2``, at most
    ``cap_low`` vertices of degree ``R-2`` and between ``floor_mid`` and
    ``cap_mid`` vertices of degree ``R-1``; it is uniform on that
    sub-ensemble.  Unset caps take :func:`default_caps`.
    """

    n: int
    R: int
    mode: str = "exact"
    cap_low: int | None = None
    cap_mid: int | None = None
    floor_mid: int | None = None
    max_restarts: int = DEFAULT_MAX_RESTARTS
    class_budget: int = EXACT_CLASS_BUDGET

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.R < 0:
            raise ValueError("R must be non-negative")
        if self.mode not in ("exact", "truncated"):
            raise ValueError(f"unknown sampler mode {self.mode!r}")
        if self.max_restarts < 1:
            raise ValueError("max_restarts must be positive")
        if self.mode == "exact":
            size = math.comb(self.n + self.R, self.R)
            if size > self.class_budget:
                raise ClassBudgetExceeded(
                    f"exact lattice has {size} classes, budget is {self.class_budget}"
                )
        else:
            if self.R < 2:
                raise ValueError("truncated mode needs R >= 2")
            low, floor, mid = default_caps(self.n, self.R)
            if self.cap_low is None:
                object.__setattr__(self, "cap_low", low)
            if self.floor_mid is None:
                object.__setattr__(self, "floor_mid", floor)
            if self.cap_mid is None:
                object.__setattr__(self, "cap_mid", mid)
            if min(self.cap_low, self.cap_mid, self.floor_mid) < 0 or self.floor_mid > self.cap_mid:
                raise ValueError("truncation caps must satisfy 0 <= floor_mid <= cap_mid, cap_low >= 0")

    @classmethod
    def auto(cls, n: int, R: int, **kwargs) -> "SamplerSpec":
        """Exact mode when the class lattice is small, truncated otherwise."""
        if R < 2 or math.comb(n + R, R) <= 100_000:
            return cls(n, R, "exact", **kwargs)
        return cls(n, R, "truncated", **kwargs)


@dataclass
class SampleTrace:
    """Observability record of one draw: every attempted class and its outcome."""

    degree_class: DegreeClass | None = None
    restarts: int = 0
    history: list[tuple[DegreeClass, bool]] = field(default_factory=list)

    @property
    def attempts(self) -> int:
        return len(self.history)

    def rows(self) -> list[tuple[str, int, int]]:
        return [(str(c), i, int(ok)) for i, (c, ok) in enumerate(self.history)]


# ------------------------------------------------------------------ class lattice


def _exact_classes(n: int, R: int) -> np.ndarray:
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], left: int, slots: int):
        if slots == 1:
            out.append((*prefix, left))
            return
        for x in range(left, -1, -1):
            prefix.append(x)
            rec(prefix, left - x, slots - 1)
            prefix.pop()

    rec([], n, R + 1)
    return np.array(out, dtype=np.int64).reshape(-1, R + 1)


def _truncated_classes(spec: SamplerSpec) -> np.ndarray:
    n, R = spec.n, spec.R
    low = np.arange(0, spec.cap_low + 1)
    mid = np.arange(spec.floor_mid, spec.cap_mid + 1)
    L, M = np.meshgrid(low, mid, indexing="ij")
    L, M = L.ravel(), M.ravel()
    top = n - L - M
    keep = top >= 0
    arr = np.zeros((int(keep.sum()), R + 1), dtype=np.int64)
    arr[:, R - 2] = L[keep]
    arr[:, R - 1] = M[keep]
    arr[:, R] = top[keep]
    return arr


def _log_weights(classes: np.ndarray) -> np.ndarray:
    R = classes.shape[1] - 1
    i = np.arange(R + 1)
    n = classes.sum(axis=1)
    two_m = classes @ i
    m = two_m // 2
    logw = gammaln(n + 1) - gammaln(classes + 1).sum(axis=1)
    logw += gammaln(two_m + 1) - gammaln(m + 1) - m * math.log(2)
    logw -= classes @ gammaln(i + 1)
    return logw


@dataclass(frozen=True)
class ClassTable:
    classes: np.ndarray
    cdf: np.ndarray

    def draw(self, rng: np.random.Generator) -> np.ndarray:
        idx = int(np.searchsorted(self.cdf, rng.random() * self.cdf[-1], side="right"))
        return self.classes[min(idx, len(self.classes) - 1)]

    def probabilities(self) -> np.ndarray:
        return np.diff(self.cdf, prepend=0.0) / self.cdf[-1]


def _compensated_cumsum(w: np.ndarray) -> np.ndarray:
    out = np.empty_like(w)
    total = 0.0
    comp = 0.0
    for i, x in enumerate(w.tolist()):
        y = x - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[i] = total
    return out


@lru_cache(maxsize=32)
def class_table(spec: SamplerSpec) -> ClassTable:
    """Admitted degree classes of ``spec`` and their cumulative weights."""
    if spec.mode == "exact":
        classes = _exact_classes(spec.n, spec.R)
    else:
        classes = _truncated_classes(spec)
    parity = (classes @ np.arange(spec.R + 1)) % 2 == 0
    classes = classes[parity]
    if not len(classes):
        raise SamplerError("no admissible degree class")
    logw = _log_weights(classes)
    cdf = _compensated_cumsum(np.exp(logw - logw.max()))
    classes.setflags(write=False)
    cdf.setflags(write=False)
    return ClassTable(classes, cdf)


def enumerate_degree_classes(
    n: int,
    R: int,
    mode: str = "exact",
    **caps,
) -> Iterator[tuple[DegreeClass, ExactWeight]]:
    """Every admitted even-sum class of the lattice with its configuration weight."""
    spec = SamplerSpec(n, R, mode, **caps)
    for row in class_table(spec).classes.tolist():
        dc = DegreeClass(tuple(row))
        yield dc, degree_class_weight(dc)


# ------------------------------------------------------------------ pipeline pieces


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def draw_stream(seed: int, index: int) -> np.random.Generator:
    """Private generator of draw ``index`` under master ``seed``."""
    return np.random.default_rng([int(seed), int(index)])


def _assign_degrees(d: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    return rng.permutation(np.repeat(np.arange(len(d)), d))


def _random_pairs(deg: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    owners = np.repeat(np.arange(1, len(deg) + 1), deg)
    return owners[rng.permutation(len(owners))].reshape(-1, 2)


def _simple_edges(pairs: np.ndarray, n: int) -> np.ndarray | None:
    """Sorted edge array if the pairs form a simple graph, else ``None``."""
    if not len(pairs):
        return np.zeros((0, 2), dtype=np.int64)
    u = np.minimum(pairs[:, 0], pairs[:, 1])
    v = np.maximum(pairs[:, 0], pairs[:, 1])
    if np.any(u == v):
        return None
    keys = np.sort(u * (n + 1) + v)
    if np.any(keys[1:] == keys[:-1]):
        return None
    return np.stack([keys // (n + 1), keys % (n + 1)], axis=1)


def sample_configuration(cell_sizes: Sequence[int], rng=None) -> Configuration:
    """Uniformly random perfect matching on the points of the given cells."""
    sizes = [int(s) for s in cell_sizes]
    total = sum(sizes)
    if total % 2:
        raise ValueError("total number of points must be even")
    perm = _as_rng(rng).permutation(total).reshape(-1, 2)
    return Configuration(sizes, perm.tolist())


def sample_uniform_graph(spec: SamplerSpec, rng=None) -> tuple[Graph, SampleTrace]:
    """One uniform graph of the spec's ensemble, with its attempt trace."""
    rng = _as_rng(rng)
    table = class_table(spec)
    trace = SampleTrace()
    for attempt in range(spec.max_restarts + 1):
        d = table.draw(rng)
        dc = DegreeClass(tuple(d.tolist()))
        deg = _assign_degrees(d, rng)
        edges = _simple_edges(_random_pairs(deg, rng), spec.n)
        trace.history.append((dc, edges is not None))
        if edges is not None:
            trace.degree_class = dc
            trace.restarts = attempt
            return Graph._trusted(spec.n, spec.R, edges), trace
    raise RestartBudgetExceeded(f"no simple graph after {spec.max_restarts} restarts")


def sample_uniform_multigraph(spec: SamplerSpec, rng=None) -> Multigraph:
    """One multigraph with class frequencies proportional to the class weights.

    This is the same pipeline without rejection: each configuration is equally
    likely, so the result is the image of a uniform configuration.
    """
    rng = _as_rng(rng)
    d = class_table(spec).draw(rng)
    pairs = _random_pairs(_assign_degrees(d, rng), rng)
    keys, counts = np.unique(np.sort(pairs, axis=1), axis=0, return_counts=True)
    return Multigraph(spec.n, {frozenset(k): int(c) for k, c in zip(keys.tolist(), counts.tolist())})


def sample_graph_given_degrees(
    degrees: Sequence[int],
    rng=None,
    R: int | None = None,
    max_restarts: int = DEFAULT_MAX_RESTARTS,
) -> Graph:
    """Uniform simple graph with vertex ``i`` of degree ``degrees[i-1]``.

    Restarts stay with the same sequence: the acceptance probability is then a
    constant, so rejection leaves the distribution uniform.
    """
    rng = _as_rng(rng)
    deg = np.asarray(degrees, dtype=np.int64)
    if deg.sum() % 2:
        raise ValueError("degree sum must be even")
    if np.any(deg < 0):
        raise ValueError("degrees must be non-negative")
    R = int(deg.max(initial=0)) if R is None else R
    n = len(deg)
    for _ in range(max_restarts + 1):
        edges = _simple_edges(_random_pairs(deg, rng), n)
        if edges is not None:
            return Graph._trusted(n, R, edges)
    raise RestartBudgetExceeded(f"no simple realisation after {max_restarts} restarts")


# ------------------------------------------------------------------ batches


def _draw_chunk(args) -> list[tuple[Graph, SampleTrace]]:
    spec, seed, start, stop = args
    return [sample_uniform_graph(spec, draw_stream(seed, i)) for i in range(start, stop)]


def batch_sample(
    spec: SamplerSpec,
    count: int,
    seed: int,
    workers: int = 1,
    start: int = 0,
) -> list[tuple[Graph, SampleTrace]]:
    """``count`` independent draws; draw ``i`` uses the stream ``(seed, start + i)``.

    The result is the same list for any number of workers.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if workers <= 1:
        return _draw_chunk((spec, seed, start, start + count))
    chunk = max(1, math.ceil(count / (workers * 4)))
    bounds = [(spec, seed, a, min(a + chunk, start + count)) for a in range(start, start + count, chunk)]
    out: list[tuple[Graph, SampleTrace]] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_draw_chunk, bounds):
            out.extend(part)
    return out


def _map_chunk(args) -> list:
    spec, seed, start, stop, fn = args
    return [fn(sample_uniform_graph(spec, draw_stream(seed, i))[0]) for i in range(start, stop)]


def batch_map(
    spec: SamplerSpec,
    count: int,
    seed: int,
    fn: Callable[[Graph], object],
    workers: int = 1,
    start: int = 0,
) -> list:
    """``[fn(G_i)]`` over the same draws as :func:`batch_sample`.

    ``fn`` runs inside the workers, so only its results cross process
    boundaries; it must be picklable when ``workers > 1``.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if workers <= 1:
        return _map_chunk((spec, seed, start, start + count, fn))
    chunk = max(1, math.ceil(count / (workers * 4)))
    bounds = [(spec, seed, a, min(a + chunk, start + count), fn) for a in range(start, start + count, chunk)]
    out: list = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_map_chunk, bounds):
            out.extend(part)
    return out


def iter_batch(spec: SamplerSpec, count: int, seed: int, start: int = 0) -> Iterator[Graph]:
    """Lazy single-process variant of :func:`batch_sample` yielding graphs only."""
    for i in range(start, start + count):
        yield sample_uniform_graph(spec, draw_stream(seed, i))[0]
