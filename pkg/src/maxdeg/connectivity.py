"""Exact vertex connectivity by repeated max-flow on the vertex-split network."""
from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, maximum_flow

from .graph import Graph, GraphError


def _split_network(G: Graph) -> csr_matrix:
    # v_in = v - 1, v_out = v - 1 + n; unit capacity inside each vertex,
    # capacity n on the edge arcs so only vertex arcs can be saturated
    n = G.n
    idx = np.arange(n)
    e = G.edges - 1
    rows = np.concatenate([idx, e[:, 0] + n, e[:, 1] + n])
    cols = np.concatenate([idx + n, e[:, 1], e[:, 0]])
    caps = np.concatenate([np.ones(n, dtype=np.int32), np.full(2 * len(e), n, dtype=np.int32)])
    return csr_matrix((caps, (rows, cols)), shape=(2 * n, 2 * n))


def local_vertex_connectivity(G: Graph, s: int, t: int, network: csr_matrix | None = None) -> int:
    """Maximum number of internally disjoint ``s``-``t`` paths for non-adjacent ``s != t``."""
    if s == t or G.has_edge(s, t):
        raise GraphError("local connectivity needs distinct non-adjacent vertices")
    net = _split_network(G) if network is None else network
    return int(maximum_flow(net, s - 1 + G.n, t - 1, method="dinic").flow_value)


def vertex_connectivity(G: Graph) -> int:
    """Size of a minimum vertex separator; ``n - 1`` for complete graphs.

    Esfahanian-Hakimi scheme: fix a vertex ``v`` of minimum degree.  A minimum
    separator either misses ``v``, and then splits it from some non-neighbour,
    or contains it, and then splits two non-adjacent neighbours of ``v``.
    """
    n = G.n
    if n < 2:
        raise GraphError("vertex connectivity is undefined for n < 2")
    if G.num_edges == n * (n - 1) // 2:
        return n - 1
    ncomp, _ = connected_components(G.csr, directed=False)
    if ncomp > 1:
        return 0
    deg = G.degrees
    adj = G.adjacency
    v = min(G.vertices(), key=lambda u: (deg[u], u))
    best = int(deg[v])
    net = _split_network(G)
    for w in G.vertices():
        if w != v and w not in adj[v]:
            best = min(best, local_vertex_connectivity(G, v, w, net))
    nbrs = sorted(adj[v])
    for i, x in enumerate(nbrs):
        for y in nbrs[i + 1 :]:
            if y not in adj[x]:
                best = min(best, local_vertex_connectivity(G, x, y, net))
    return best
