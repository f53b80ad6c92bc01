"""Cut games on edge-weighted and vertex-weighted graphs.

Weights are exact: every weight is coerced to ``fractions.Fraction`` (or kept
as ``int``), so the comparisons below never round.  A cut is a tuple of 0/1
side labels, one per vertex.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from .errors import DimensionError, InvalidArgument, InvalidInstance, NotAnEdge

__all__ = [
    "as_weight",
    "EdgeWeightedGraph",
    "VertexWeightedGraph",
    "make_cut",
    "canonical_cut",
    "flip",
    "nmc_edge_weight",
    "cut_value",
    "flip_gain",
    "is_local_optimum",
    "is_approx_equilibrium_nmc",
    "bias",
    "nmc_potential",
    "total_weight",
    "FlipState",
    "flip_dynamics",
]


def as_weight(x, *, positive=False, name="weight"):
    """Coerce ``x`` to an exact rational; reject floats and negatives."""
    if isinstance(x, bool):
        raise InvalidArgument(f"{name} must be a number, got bool")
    if isinstance(x, int):
        value = x
    elif isinstance(x, Rational):
        value = Fraction(x)
        if value.denominator == 1:
            value = value.numerator
    elif isinstance(x, str):
        value = Fraction(x.strip())
        if value.denominator == 1:
            value = value.numerator
    else:
        # floats would silently round, which defeats the purpose
        raise InvalidArgument(f"{name} must be an exact rational, got {type(x).__name__}")
    if value < 0 or (positive and value == 0):
        raise InvalidArgument(f"{name} must be {'positive' if positive else 'nonnegative'}, got {value}")
    return value


def _check_edges(n, pairs):
    seen = set()
    for u, v in pairs:
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidInstance(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise InvalidInstance(f"self-loop at vertex {u}")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise InvalidInstance(f"duplicate edge {key}")
        seen.add(key)


def _adjacency(n, triples):
    adj = [[] for _ in range(n)]
    for u, v, w in triples:
        adj[u].append((v, w))
        adj[v].append((u, w))
    return tuple(tuple(a) for a in adj)


@dataclass(frozen=True)
class EdgeWeightedGraph:
    """A Max-Cut instance: ``n`` vertices and ``(u, v, w)`` edges with ``w > 0``."""

    n: int
    edges: tuple
    adj: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise InvalidInstance("vertex count must be nonnegative")
        edges = tuple((int(u), int(v), as_weight(w, positive=True, name="edge weight"))
                      for u, v, w in self.edges)
        _check_edges(self.n, [(u, v) for u, v, _ in edges])
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "adj", _adjacency(self.n, edges))

    @property
    def m(self):
        return len(self.edges)

    def edge_weights(self):
        return list(self.edges)


@dataclass(frozen=True)
class VertexWeightedGraph:
    """A Node-Max-Cut instance; edge ``{u, v}`` weighs ``w_u * w_v``."""

    weights: tuple
    edges: tuple
    adj: tuple = field(init=False, repr=False, compare=False)
    _edge_set: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        weights = tuple(as_weight(w, positive=True, name="vertex weight") for w in self.weights)
        n = len(weights)
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        _check_edges(n, edges)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "edges", edges)
        adj = [[] for _ in range(n)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "adj", tuple(tuple(a) for a in adj))
        object.__setattr__(self, "_edge_set", frozenset(frozenset(e) for e in edges))

    @property
    def n(self):
        return len(self.weights)

    @property
    def m(self):
        return len(self.edges)

    def has_edge(self, u, v):
        return frozenset((u, v)) in self._edge_set

    def max_degree(self):
        return max((len(a) for a in self.adj), default=0)

    def edge_weights(self):
        w = self.weights
        return [(u, v, w[u] * w[v]) for u, v in self.edges]

    def as_edge_weighted(self):
        return EdgeWeightedGraph(self.n, tuple(self.edge_weights()))

    def with_weights(self, weights):
        return VertexWeightedGraph(tuple(weights), self.edges)


# ---------------------------------------------------------------- cuts

def make_cut(bits: Iterable) -> tuple:
    """Normalize a cut given as a 0/1 sequence or string."""
    if isinstance(bits, str):
        bits = [c for c in bits.strip()]
    out = []
    for b in bits:
        b = int(b)
        if b not in (0, 1):
            raise InvalidArgument(f"cut labels must be 0 or 1, got {b}")
        out.append(b)
    return tuple(out)


def canonical_cut(cut: Sequence[int]) -> tuple:
    """Complement-normalize so vertex 0 sits on side 0."""
    cut = tuple(cut)
    if cut and cut[0] == 1:
        return tuple(1 - b for b in cut)
    return cut


def flip(cut: Sequence[int], v: int) -> tuple:
    cut = list(cut)
    cut[v] = 1 - cut[v]
    return tuple(cut)


def _check_cut(g, cut):
    if len(cut) != g.n:
        raise DimensionError(f"cut has {len(cut)} labels but graph has {g.n} vertices")


def _incident(g, v):
    """Yield (neighbor, edge weight) pairs for either graph kind."""
    if isinstance(g, VertexWeightedGraph):
        wv = g.weights[v]
        for u in g.adj[v]:
            yield u, wv * g.weights[u]
    else:
        yield from g.adj[v]


def nmc_edge_weight(g: VertexWeightedGraph, u: int, v: int):
    if not g.has_edge(u, v):
        raise NotAnEdge(f"{{{u}, {v}}} is not an edge")
    return g.weights[u] * g.weights[v]


def cut_value(g, cut):
    """Total weight of edges whose endpoints lie on opposite sides."""
    _check_cut(g, cut)
    total = 0
    for u, v, w in g.edge_weights():
        if cut[u] != cut[v]:
            total += w
    return total


def total_weight(g):
    return sum((w for _, _, w in g.edge_weights()), 0)


def flip_gain(g, cut, v):
    """Change in cut value when ``v`` switches sides (local recount)."""
    gain = 0
    side = cut[v]
    for u, w in _incident(g, v):
        if cut[u] == side:
            gain += w
        else:
            gain -= w
    return gain


def is_local_optimum(g, cut) -> bool:
    _check_cut(g, cut)
    return all(flip_gain(g, cut, v) <= 0 for v in range(g.n))


def side_sums(g: VertexWeightedGraph, cut, i):
    """Return (same-side, opposite-side) neighbor weight of vertex ``i``."""
    same = other = 0
    for j in g.adj[i]:
        if cut[j] == cut[i]:
            same += g.weights[j]
        else:
            other += g.weights[j]
    return same, other


def is_approx_equilibrium_nmc(g: VertexWeightedGraph, cut, eps=0) -> bool:
    """True iff no vertex has same-side weight above (1+eps) times opposite-side weight."""
    eps = as_weight(eps, name="eps")
    _check_cut(g, cut)
    factor = 1 + eps
    for i in range(g.n):
        same, other = side_sums(g, cut, i)
        if same > factor * other:
            return False
    return True


def bias(g: VertexWeightedGraph, cut, i, subset=None):
    """|weight of side-1 neighbors - weight of side-0 neighbors| within ``subset``.

    ``subset=None`` means all vertices.
    """
    if subset is not None and not isinstance(subset, (set, frozenset)):
        subset = set(subset)
    diff = 0
    for j in g.adj[i]:
        if subset is not None and j not in subset:
            continue
        diff += g.weights[j] if cut[j] == 1 else -g.weights[j]
    return abs(diff)


def nmc_potential(g: VertexWeightedGraph, cut):
    """Sum of ``w_u * w_v`` over edges whose endpoints share a side."""
    _check_cut(g, cut)
    w = g.weights
    return sum((w[u] * w[v] for u, v in g.edges if cut[u] == cut[v]), 0)


# ---------------------------------------------------------------- dynamics

class FlipState:
    """A cut plus each vertex's push: same-side minus opposite-side neighbour weight.

    A vertex wants to move exactly when its push is positive.  Flipping
    updates the pushes of the flipped vertex and its neighbours only, so
    long runs on large compiled instances stay linear in the work done.
    """

    def __init__(self, g: VertexWeightedGraph, cut):
        _check_cut(g, cut)
        self.g = g
        self.cut = list(cut)
        w, side = g.weights, self.cut
        self.push = [sum((w[u] if side[u] == side[v] else -w[u]) for u in g.adj[v])
                     for v in range(g.n)]
        self.flips = 0

    def unhappy(self, v) -> bool:
        return self.push[v] > 0

    def gain(self, v):
        """Potential decrease if ``v`` flips (positive means improving)."""
        return self.g.weights[v] * self.push[v]

    def flip(self, v):
        w = self.g.weights[v]
        side = self.cut[v] = 1 - self.cut[v]
        self.push[v] = -self.push[v]
        cut, push = self.cut, self.push
        for u in self.g.adj[v]:
            if cut[u] == side:
                push[u] += 2 * w
            else:
                push[u] -= 2 * w
        self.flips += 1

    def unhappy_vertices(self):
        return [v for v in range(self.g.n) if self.push[v] > 0]


def flip_dynamics(g: VertexWeightedGraph, cut, schedule="max-gain", frozen=(), cap=10 ** 6):
    """Improving flips until no free vertex wants to move or ``cap`` flips happen.

    ``schedule`` is ``"max-gain"`` (largest potential drop first) or
    ``"fifo"`` (a work queue of unhappy vertices).  Vertices in ``frozen``
    never move.  Returns ``(cut, flips, converged)``.
    """
    if schedule not in ("max-gain", "fifo"):
        raise InvalidArgument(f"unknown schedule {schedule!r}")
    st = FlipState(g, cut)
    frozen = set(frozen)
    free = [v for v in range(g.n) if v not in frozen]
    if schedule == "fifo":
        queue = deque(v for v in free if st.push[v] > 0)
        queued = set(queue)
        while queue:
            v = queue.popleft()
            queued.discard(v)
            if st.push[v] <= 0:
                continue
            if st.flips >= cap:
                return tuple(st.cut), st.flips, False
            st.flip(v)
            for u in g.adj[v]:
                if u not in frozen and u not in queued and st.push[u] > 0:
                    queue.append(u)
                    queued.add(u)
        return tuple(st.cut), st.flips, True
    heap = [(-st.gain(v), v) for v in free if st.push[v] > 0]
    heapq.heapify(heap)
    while heap:
        neg, v = heapq.heappop(heap)
        gain = st.gain(v)
        if gain <= 0 or -neg != gain:
            continue        # stale entry; a fresh one was pushed when it changed
        if st.flips >= cap:
            return tuple(st.cut), st.flips, False
        st.flip(v)
        for u in g.adj[v]:
            if u not in frozen and st.push[u] > 0:
                heapq.heappush(heap, (-st.gain(u), u))
    return tuple(st.cut), st.flips, True
