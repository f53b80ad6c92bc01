"""Exhaustive search over cut assignments with some vertices held fixed.

Cuts are walked in Gray code order so each step flips one vertex and
updates only its neighbours' pushes.  Before enumerating, every free
vertex whose fixed neighbours strictly outweigh its free ones is fixed;
such a vertex takes that value at every local optimum, so the pre-pass
never loses a solution.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import InvalidArgument, TooLarge
from .games_core import EdgeWeightedGraph, VertexWeightedGraph

__all__ = ["MAX_FREE", "weighted_adjacency", "gray_search", "dominance_fix", "PinnedOptima",
           "pinned_local_optima"]

MAX_FREE = 22


def weighted_adjacency(g):
    """Neighbour lists of ``(u, edge weight)`` for either graph kind."""
    if isinstance(g, VertexWeightedGraph):
        w = g.weights
        return [[(u, w[v] * w[u]) for u in g.adj[v]] for v in range(g.n)]
    if isinstance(g, EdgeWeightedGraph):
        return [list(a) for a in g.adj]
    raise InvalidArgument(f"expected a graph, got {type(g).__name__}")


def gray_search(adj, side, free, check):
    """Yield after every assignment of ``free`` in which no ``check`` vertex wants to move.

    ``side`` is mutated in place (callers copy what they keep).  The push of a
    vertex is same-side minus opposite-side weight; it is updated locally on
    each flip so one step costs the degree of the flipped vertex.
    """
    check = set(check)
    push = {}
    for v in check:
        push[v] = sum((w if side[u] == side[v] else -w) for u, w in adj[v])
    unhappy = sum(1 for v in check if push[v] > 0)
    if unhappy == 0:
        yield
    for k in range(1, 2 ** len(free)):
        v = free[(k & -k).bit_length() - 1]
        side[v] ^= 1
        if v in check:
            before = push[v] > 0
            push[v] = -push[v]
            unhappy += (push[v] > 0) - before
        for u, w in adj[v]:
            if u in check:
                before = push[u] > 0
                push[u] += 2 * w if side[u] == side[v] else -2 * w
                unhappy += (push[u] > 0) - before
        if unhappy == 0:
            yield


@dataclass(frozen=True)
class PinnedOptima:
    """Local optima of a graph whose boundary vertices are held fixed.

    ``assignments`` are side labels (dicts keyed by vertex).  When
    ``complete`` is false the search stopped at dominance propagation and
    the single assignment lists only the vertices whose value is forced.
    """
    assignments: tuple
    complete: bool
    mode: str
    free: int


def dominance_fix(g: VertexWeightedGraph, side: dict):
    """Fix every free vertex whose fixed neighbours outweigh all its free ones.

    Such a vertex has the same value at every local optimum, so fixing it
    is sound; the propagation repeats until nothing changes.
    """
    w = g.weights
    toward_one, slack = {}, {}
    for v in range(g.n):
        if v in side:
            continue
        t = s = 0
        for u in g.adj[v]:
            if u in side:
                t += w[u] if side[u] == 0 else -w[u]
            else:
                s += w[u]
        toward_one[v], slack[v] = t, s
    queue = deque(toward_one)
    while queue:
        v = queue.popleft()
        if v in side:
            continue
        t, s = toward_one[v], slack[v]
        if abs(t) <= s:
            continue
        val = 1 if t > 0 else 0
        side[v] = val
        for u in g.adj[v]:
            if u not in side:
                slack[u] -= w[v]
                toward_one[u] += w[v] if val == 0 else -w[v]
                queue.append(u)
    return [v for v in range(g.n) if v not in side]


def pinned_local_optima(g: VertexWeightedGraph, pinned: dict, mode="auto", max_free=MAX_FREE):
    """Local optima of the free vertices given the ``pinned`` side labels.

    ``mode`` is ``exhaustive`` (raise :class:`TooLarge` if more than
    ``max_free`` vertices survive dominance propagation), ``dominance``
    (stop after propagation) or ``auto`` (enumerate when small enough,
    otherwise stop after propagation).
    """
    if mode not in ("auto", "exhaustive", "dominance"):
        raise InvalidArgument(f"unknown mode {mode!r}")
    side = {v: int(x) for v, x in pinned.items()}
    rest = dominance_fix(g, side)
    if mode == "dominance" or not rest or (mode == "auto" and len(rest) > max_free):
        return PinnedOptima((dict(side),), not rest, "dominance", len(rest))
    if len(rest) > max_free:
        raise TooLarge(f"{len(rest)} free vertices remain after dominance propagation")
    adj = weighted_adjacency(g)
    labels = [side.get(v, 0) for v in range(g.n)]
    found = []
    for _ in gray_search(adj, labels, rest, rest):
        found.append({v: labels[v] for v in range(g.n)})
    return PinnedOptima(tuple(found), True, "exhaustive", len(rest))
