"""Exhaustive solver for the k-round Ehrenfeucht-Fraisse game on two graphs."""
from __future__ import annotations

import enum

from ..graph import Graph

DEFAULT_POSITION_BUDGET = 2_000_000


class Winner(enum.Enum):
    DUPLICATOR = "Duplicator"
    SPOILER = "Spoiler"

    def __str__(self) -> str:
        return self.value


class GameBudgetError(RuntimeError):
    pass


def _masks(G: Graph) -> list[int]:
    out = [0] * (G.n + 1)
    for u, v in G.edge_list():
        out[u] |= 1 << v
        out[v] |= 1 << u
    return out


def ef_game(G: Graph, H: Graph, k: int, budget: int = DEFAULT_POSITION_BUDGET) -> Winner:
    """Winner of the ``k``-round game with optimal play.

    A position is the set of pebbled pairs; it is memoised together with the
    number of rounds left.  Duplicator must keep the pebbled pairs a partial
    isomorphism (equality and adjacency preserved both ways).
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if G.n == H.n and G.edges.tobytes() == H.edges.tobytes():
        return Winner.DUPLICATOR
    if k == 0:
        return Winner.DUPLICATOR

    adj_g, adj_h = _masks(G), _masks(H)
    verts_g, verts_h = range(1, G.n + 1), range(1, H.n + 1)
    memo: dict[tuple[frozenset, int], bool] = {}
    visited = 0

    def compatible(pairs, a: int, b: int) -> bool:
        for x, y in pairs:
            if (x == a) != (y == b):
                return False
            if bool(adj_g[x] >> a & 1) != bool(adj_h[y] >> b & 1):
                return False
        return True

    def duplicator_wins(pairs: frozenset, left: int) -> bool:
        nonlocal visited
        if left == 0:
            return True
        key = (pairs, left)
        hit = memo.get(key)
        if hit is not None:
            return hit
        visited += 1
        if visited > budget:
            raise GameBudgetError(f"more than {budget} game positions")
        used_g = {x for x, _ in pairs}
        used_h = {y for _, y in pairs}
        result = True
        # Spoiler re-pebbling a used vertex is answered by its partner and changes nothing.
        for a in verts_g:
            if a in used_g:
                continue
            if not any(
                compatible(pairs, a, b) and duplicator_wins(pairs | {(a, b)}, left - 1) for b in verts_h
            ):
                result = False
                break
        if result:
            for b in verts_h:
                if b in used_h:
                    continue
                if not any(
                    compatible(pairs, a, b) and duplicator_wins(pairs | {(a, b)}, left - 1) for a in verts_g
                ):
                    result = False
                    break
        memo[key] = result
        return result

    return Winner.DUPLICATOR if duplicator_wins(frozenset(), k) else Winner.SPOILER
