"""Weighted network congestion games with linear latencies.

Networks are undirected multigraphs.  A path is stored as the tuple of edge
indices it traverses, starting at the player's origin, because parallel
edges make vertex sequences ambiguous.  Paths compare lexicographically by
that tuple, which is the tie-break used everywhere below.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InvalidArgument, InvalidInstance, StepCapExceeded, TooLarge
from .games_core import as_weight

__all__ = [
    "LinearLatency",
    "IDENTITY",
    "Edge",
    "Network",
    "Player",
    "CongestionGame",
    "Leaf",
    "Series",
    "Parallel",
    "series",
    "parallel",
    "sp_realize",
    "sp_path_count",
    "enumerate_paths",
    "path_vertices",
    "check_profile",
    "congestion_and_costs",
    "player_cost",
    "potential_wcg",
    "best_response",
    "is_pne",
    "is_pne_exhaustive",
    "improving_players",
    "br_dynamics",
    "random_simple_path",
    "BestResponseDynamics",
    "DEFAULT_PATH_CAP",
]

DEFAULT_PATH_CAP = 100_000


@dataclass(frozen=True)
class LinearLatency:
    a: object = 1
    b: object = 0

    def __post_init__(self):
        object.__setattr__(self, "a", as_weight(self.a, name="latency slope"))
        object.__setattr__(self, "b", as_weight(self.b, name="latency intercept"))

    def __call__(self, x):
        return self.a * x + self.b


IDENTITY = LinearLatency(1, 0)


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    latency: LinearLatency = IDENTITY
    label: object = None

    def other(self, x):
        return self.v if x == self.u else self.u


@dataclass(frozen=True)
class Network:
    num_vertices: int
    edges: tuple
    adj: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        edges = tuple(e if isinstance(e, Edge) else Edge(*e) for e in self.edges)
        adj = [[] for _ in range(self.num_vertices)]
        for k, e in enumerate(edges):
            if not (0 <= e.u < self.num_vertices and 0 <= e.v < self.num_vertices):
                raise InvalidInstance(f"edge {k} has an endpoint out of range")
            if e.u == e.v:
                raise InvalidInstance(f"edge {k} is a self-loop")
            adj[e.u].append((k, e.v))
            adj[e.v].append((k, e.u))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "adj", tuple(tuple(a) for a in adj))


@dataclass(frozen=True)
class Player:
    weight: object
    origin: int
    destination: int
    label: object = None

    def __post_init__(self):
        object.__setattr__(self, "weight", as_weight(self.weight, positive=True, name="player weight"))
        if self.origin == self.destination:
            raise InvalidInstance("origin and destination must differ")


@dataclass(frozen=True)
class CongestionGame:
    network: Network
    players: tuple

    def __post_init__(self):
        players = tuple(p if isinstance(p, Player) else Player(*p) for p in self.players)
        nv = self.network.num_vertices
        for i, p in enumerate(players):
            if not (0 <= p.origin < nv and 0 <= p.destination < nv):
                raise InvalidInstance(f"player {i} has an endpoint out of range")
            if not _connected(self.network, p.origin, p.destination):
                raise InvalidInstance(f"player {i} has no origin-destination path")
        object.__setattr__(self, "players", players)
        # integer copies of weights and latencies for the hot loops; every
        # cost is multiplied by the same positive ``scale``
        wden = math.lcm(1, *(Fraction(p.weight).denominator for p in players))
        lden = math.lcm(1, *(Fraction(x).denominator for e in self.network.edges
                             for x in (e.latency.a, e.latency.b)))
        object.__setattr__(self, "_scale", wden * lden)
        object.__setattr__(self, "_W", tuple(int(p.weight * wden) for p in players))
        object.__setattr__(self, "_A", tuple(int(e.latency.a * lden) for e in self.network.edges))
        object.__setattr__(self, "_B", tuple(int(e.latency.b * lden * wden) for e in self.network.edges))

    def _unscale(self, x):
        v = Fraction(x, self._scale)
        return v.numerator if v.denominator == 1 else v

    @property
    def num_players(self):
        return len(self.players)


def _connected(net, o, d):
    seen = {o}
    stack = [o]
    while stack:
        u = stack.pop()
        if u == d:
            return True
        for _, v in net.adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return False


# ---------------------------------------------------------------- series-parallel terms

@dataclass(frozen=True)
class Leaf:
    latency: LinearLatency = IDENTITY
    label: object = None


@dataclass(frozen=True)
class Series:
    left: object
    right: object


@dataclass(frozen=True)
class Parallel:
    left: object
    right: object


def series(*terms):
    out = terms[0]
    for t in terms[1:]:
        out = Series(out, t)
    return out


def parallel(*terms):
    out = terms[0]
    for t in terms[1:]:
        out = Parallel(out, t)
    return out


def sp_realize(term):
    """Realize a composition tree; returns ``(network, origin, destination)``.

    Vertex 0 is the origin and vertex 1 the destination; interior vertices
    are numbered in the order series joints are created (left to right).
    """
    edges = []
    count = [2]

    def build(t, o, d):
        if isinstance(t, Leaf):
            edges.append(Edge(o, d, t.latency, t.label))
        elif isinstance(t, Series):
            mid = count[0]
            count[0] += 1
            build(t.left, o, mid)
            build(t.right, mid, d)
        elif isinstance(t, Parallel):
            build(t.left, o, d)
            build(t.right, o, d)
        else:
            raise InvalidInstance(f"not a series-parallel term: {t!r}")

    build(term, 0, 1)
    return Network(count[0], tuple(edges)), 0, 1


def sp_path_count(term):
    if isinstance(term, Leaf):
        return 1
    if isinstance(term, Series):
        return sp_path_count(term.left) * sp_path_count(term.right)
    return sp_path_count(term.left) + sp_path_count(term.right)


# ---------------------------------------------------------------- paths

def enumerate_paths(net: Network, o, d, cap=DEFAULT_PATH_CAP):
    """All simple o-d paths in lexicographic order of their edge tuples."""
    if o == d:
        raise InvalidArgument("origin and destination must differ")
    out = []
    visited = [False] * net.num_vertices
    visited[o] = True
    stack = []

    def dfs(u):
        if u == d:
            out.append(tuple(stack))
            if len(out) > cap:
                raise TooLarge(f"more than {cap} simple paths between {o} and {d}")
            return
        for k, v in net.adj[u]:
            if not visited[v]:
                visited[v] = True
                stack.append(k)
                dfs(v)
                stack.pop()
                visited[v] = False

    dfs(o)
    return out


def path_vertices(net: Network, o, path):
    seq = [o]
    for k in path:
        e = net.edges[k]
        u = seq[-1]
        if u not in (e.u, e.v):
            raise InvalidInstance(f"edge {k} does not leave vertex {u}")
        seq.append(e.other(u))
    return seq


def check_profile(game: CongestionGame, profile):
    if len(profile) != game.num_players:
        raise InvalidInstance(f"profile has {len(profile)} paths for {game.num_players} players")
    for i, (p, path) in enumerate(zip(game.players, profile)):
        seq = path_vertices(game.network, p.origin, path)
        if seq[-1] != p.destination:
            raise InvalidInstance(f"path of player {i} does not end at its destination")
        if len(set(seq)) != len(seq):
            raise InvalidInstance(f"path of player {i} is not simple")
    return tuple(tuple(path) for path in profile)


def random_simple_path(net: Network, o, d, rng: random.Random):
    """A simple o-d path from a randomized depth-first search."""
    visited = {o}
    stack = []

    def dfs(u):
        if u == d:
            return True
        nbrs = list(net.adj[u])
        rng.shuffle(nbrs)
        for k, v in nbrs:
            if v not in visited:
                visited.add(v)
                stack.append(k)
                if dfs(v):
                    return True
                stack.pop()
        return False

    if not dfs(o):
        raise InvalidInstance(f"no path from {o} to {d}")
    return tuple(stack)


# ---------------------------------------------------------------- costs and potential

def _loads(game, profile):
    loads = [0] * len(game.network.edges)
    for p, path in zip(game.players, profile):
        for k in path:
            loads[k] += p.weight
    return loads


def congestion_and_costs(game: CongestionGame, profile):
    """Per-edge congestion and per-player cost."""
    loads = _loads(game, profile)
    edges = game.network.edges
    costs = [sum((edges[k].latency(loads[k]) for k in path), 0) for path in profile]
    return loads, costs


def player_cost(game, profile, i):
    return congestion_and_costs(game, profile)[1][i]


def potential_wcg(game: CongestionGame, profile):
    """Weighted potential: edge terms plus each player's self-congestion term."""
    loads = _loads(game, profile)
    total = 0
    for e, x in zip(game.network.edges, loads):
        total += e.latency.a * x * x + e.latency.b * x
    for p, path in zip(game.players, profile):
        w = p.weight
        for k in path:
            lat = game.network.edges[k].latency
            total += w * (lat.a * w + lat.b)
    return total


# ---------------------------------------------------------------- best response
# The helpers below work on the integer tables of the game: loads are in
# units of the weight denominator and costs are multiplied by ``game._scale``.

def _int_loads(game, profile):
    loads = [0] * len(game.network.edges)
    for w, path in zip(game._W, profile):
        for k in path:
            loads[k] += w
    return loads


def _edge_costs_for(game, loads, i, current):
    """Scaled cost each edge would charge player ``i`` if it used it."""
    w = game._W[i]
    mine = set(current)
    A, B = game._A, game._B
    return [A[k] * (loads[k] + (0 if k in mine else w)) + B[k] for k in range(len(A))]


def _best_path(net, o, d, costs):
    """Lexicographically smallest minimum-cost simple o-d path."""
    dist = {d: 0}
    heap = [(0, d)]
    done = set()
    while heap:
        du, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for k, v in net.adj[u]:
            nd = du + costs[k]
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    best = dist[o]
    # walk tight edges in index order; backtrack only through zero-cost ties
    visited = {o}
    stack = []

    def dfs(u, spent):
        if u == d:
            return True
        for k, v in net.adj[u]:
            if v in visited or v not in dist:
                continue
            if spent + costs[k] + dist[v] != best:
                continue
            visited.add(v)
            stack.append(k)
            if dfs(v, spent + costs[k]):
                return True
            stack.pop()
            visited.discard(v)
        return False

    dfs(o, 0)
    return tuple(stack), best


def _int_best_response(game, profile, i, loads):
    p = game.players[i]
    costs = _edge_costs_for(game, loads, i, profile[i])
    return _best_path(game.network, p.origin, p.destination, costs)


def _int_cost(game, loads, path):
    A, B = game._A, game._B
    return sum(A[k] * loads[k] + B[k] for k in path)


def best_response(game: CongestionGame, profile, i):
    """``(path, cost)`` minimizing player ``i``'s cost, others fixed."""
    loads = _int_loads(game, profile)
    path, cost = _int_best_response(game, profile, i, loads)
    return path, game._unscale(cost)


def _int_improving(game, profile, eps, loads):
    out = []
    for i in range(game.num_players):
        cur = _int_cost(game, loads, profile[i])
        path, cost = _int_best_response(game, profile, i, loads)
        if cur > (1 + eps) * cost:
            out.append((i, cur, path, cost))
    return out


def improving_players(game, profile, eps=0):
    """List of ``(i, current cost, best path, best cost)`` for players who gain."""
    eps = as_weight(eps, name="eps")
    loads = _int_loads(game, profile)
    return [(i, game._unscale(c), path, game._unscale(b))
            for i, c, path, b in _int_improving(game, profile, eps, loads)]


def is_pne(game: CongestionGame, profile, eps=0) -> bool:
    """No player can cut its cost by more than a factor ``1 + eps``.

    The comparison is against the exact minimum over all o-d paths.
    """
    eps = as_weight(eps, name="eps")
    profile = check_profile(game, profile)
    return not _int_improving(game, profile, eps, _int_loads(game, profile))


def is_pne_exhaustive(game: CongestionGame, profile, eps=0, cap=DEFAULT_PATH_CAP) -> bool:
    """Same predicate, checking every enumerated alternative path."""
    eps = as_weight(eps, name="eps")
    profile = check_profile(game, profile)
    loads = _int_loads(game, profile)
    paths = {}
    for i, p in enumerate(game.players):
        key = (p.origin, p.destination)
        if key not in paths:
            paths[key] = enumerate_paths(game.network, p.origin, p.destination, cap)
        costs = _edge_costs_for(game, loads, i, profile[i])
        cur = sum(costs[k] for k in profile[i])
        best = min(sum(costs[k] for k in q) for q in paths[key])
        if cur > (1 + eps) * best:
            return False
    return True


# ---------------------------------------------------------------- dynamics

def br_dynamics(game: CongestionGame, start, schedule="round-robin", eps=0,
                max_steps=10_000, seed=None):
    """Best-response dynamics until an ``eps``-equilibrium or the step cap.

    ``schedule`` is ``round-robin`` (next improving player after the last
    mover), ``max-gain`` (largest absolute cost drop, lowest index on ties)
    or ``seeded-random`` (uniform among improving players).  Returns
    ``(profile, trace)``; each trace entry is ``(player, old cost, new cost,
    potential after the move)``.
    """
    if max_steps <= 0:
        raise InvalidArgument("max_steps must be positive")
    if schedule not in ("round-robin", "max-gain", "seeded-random"):
        raise InvalidArgument(f"unknown schedule {schedule!r}")
    eps = as_weight(eps, name="eps")
    rng = random.Random(seed)
    profile = list(check_profile(game, start))
    loads = _int_loads(game, profile)
    trace = []
    last = -1
    n = game.num_players
    while True:
        if schedule == "round-robin":
            move = None
            for step in range(1, n + 1):
                i = (last + step) % n
                cur = _int_cost(game, loads, profile[i])
                path, cost = _int_best_response(game, profile, i, loads)
                if cur > (1 + eps) * cost:
                    move = (i, cur, path, cost)
                    break
        elif schedule == "max-gain":
            cands = _int_improving(game, profile, eps, loads)
            move = max(cands, key=lambda c: (c[1] - c[3], -c[0])) if cands else None
        else:
            # the first improver in a uniformly random order is a uniform
            # pick among improvers, without pricing every player
            move = None
            order = list(range(n))
            rng.shuffle(order)
            for i in order:
                cur = _int_cost(game, loads, profile[i])
                path, cost = _int_best_response(game, profile, i, loads)
                if cur > (1 + eps) * cost:
                    move = (i, cur, path, cost)
                    break
        if move is None:
            return tuple(profile), trace
        if len(trace) >= max_steps:
            raise StepCapExceeded(f"no equilibrium within {max_steps} steps",
                                  profile=tuple(profile), trace=trace)
        i, cur, path, cost = move
        w = game._W[i]
        for k in profile[i]:
            loads[k] -= w
        for k in path:
            loads[k] += w
        profile[i] = path
        last = i
        trace.append((i, game._unscale(cur), game._unscale(cost), potential_wcg(game, profile)))


class BestResponseDynamics:
    """Thin estimator-style wrapper around :func:`br_dynamics`."""

    def __init__(self, schedule="round-robin", eps=0, max_steps=10_000, seed=None):
        self.schedule = schedule
        self.eps = eps
        self.max_steps = max_steps
        self.seed = seed

    def get_params(self, deep=True):
        return {"schedule": self.schedule, "eps": self.eps,
                "max_steps": self.max_steps, "seed": self.seed}

    def set_params(self, **params):
        for k, v in params.items():
            if k not in self.get_params():
                raise InvalidArgument(f"unknown parameter {k!r}")
            setattr(self, k, v)
        return self

    def run(self, game, start):
        self.profile_, self.trace_ = br_dynamics(
            game, start, self.schedule, self.eps, self.max_steps, self.seed)
        return self.profile_
