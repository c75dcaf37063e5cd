"""Rigidity and isomorphism testing by colour refinement with individualisation."""
from __future__ import annotations

from collections import Counter

from .graph import Graph

DEFAULT_RIGID_CAP = 1000
DEFAULT_ISO_CAP = 10


class SizeCapError(ValueError):
    """Raised when a graph exceeds the size cap of a search routine."""


def _signatures(adj, colors):
    return [
        (colors[v], tuple(sorted(colors[w] for w in adj[v]))) for v in range(len(colors))
    ]


def _joint_refine(adj_g, col_g, adj_h, col_h):
    """Refine two colourings with a shared canonical naming.

    Returns the stable pair of colourings, or ``None`` as soon as the colour
    multisets disagree (no colour-preserving isomorphism can exist).
    """
    n_classes = len(set(col_g))
    while True:
        sig_g = _signatures(adj_g, col_g)
        sig_h = _signatures(adj_h, col_h)
        if Counter(sig_g) != Counter(sig_h):
            return None
        names = {s: i for i, s in enumerate(sorted(set(sig_g)))}
        col_g = [names[s] for s in sig_g]
        col_h = [names[s] for s in sig_h]
        if len(names) == n_classes:
            return col_g, col_h
        n_classes = len(names)


def _individualise(colors, v):
    fresh = max(colors) + 1
    out = list(colors)
    out[v] = fresh
    return out


def _target_cell(colors):
    counts = Counter(colors)
    size, color = min((c, col) for col, c in counts.items() if c > 1)
    return color


def _search_iso(adj_g, col_g, adj_h, col_h, edges_g, adj_h_sets) -> bool:
    refined = _joint_refine(adj_g, col_g, adj_h, col_h)
    if refined is None:
        return False
    col_g, col_h = refined
    if len(set(col_g)) == len(col_g):
        where = {c: v for v, c in enumerate(col_h)}
        f = [where[c] for c in col_g]
        return all(f[v] in adj_h_sets[f[u]] for u, v in edges_g)
    color = _target_cell(col_g)
    v = col_g.index(color)
    g_ind = _individualise(col_g, v)
    for w, c in enumerate(col_h):
        if c == color and _search_iso(
            adj_g, g_ind, adj_h, _individualise(col_h, w), edges_g, adj_h_sets
        ):
            return True
    return False


def _zero_based(G: Graph):
    adj = [tuple(w - 1 for w in G.sorted_adjacency[v]) for v in G.vertices()]
    edges = [(u - 1, v - 1) for u, v in G.edges.tolist()]
    return adj, edges, [set(a) for a in adj]


def isomorphic(G: Graph, H: Graph, cap: int | None = DEFAULT_ISO_CAP) -> bool:
    """Whether an edge-preserving bijection between ``G`` and ``H`` exists."""
    if cap is not None and max(G.n, H.n) > cap:
        raise SizeCapError(f"isomorphism test capped at n={cap}")
    if G.n != H.n or G.num_edges != H.num_edges:
        return False
    if G.n == 0:
        return True
    adj_g, edges_g, _ = _zero_based(G)
    adj_h, _, sets_h = _zero_based(H)
    zeros = [0] * G.n
    return _search_iso(adj_g, zeros, adj_h, zeros, edges_g, sets_h)


def is_rigid(G: Graph, cap: int | None = DEFAULT_RIGID_CAP) -> bool:
    """Whether the identity is the only automorphism of ``G``.

    Colour refinement gives an automorphism-invariant partition.  For the
    first vertex ``v`` of a smallest non-trivial cell we ask whether some
    automorphism moves ``v`` to another vertex of its cell; if none does,
    every automorphism fixes ``v``, so ``v`` is individualised and the loop
    continues until the partition is discrete.
    """
    if cap is not None and G.n > cap:
        raise SizeCapError(f"rigidity test capped at n={cap}")
    if G.n <= 1:
        return True
    adj, edges, sets = _zero_based(G)
    colors, _ = _joint_refine(adj, [0] * G.n, adj, [0] * G.n)
    while len(set(colors)) < len(colors):
        color = _target_cell(colors)
        cell = [v for v, c in enumerate(colors) if c == color]
        v = cell[0]
        fixed = _individualise(colors, v)
        for w in cell[1:]:
            if _search_iso(adj, fixed, adj, _individualise(colors, w), edges, sets):
                return False
        colors, _ = _joint_refine(adj, fixed, adj, fixed)
    return True
