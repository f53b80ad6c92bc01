"""Max-Cut to single-commodity series-parallel congestion games.

Vertex ``k`` of the source graph (1-based here) becomes three players of
weight ``16**k``.  The network is two identical copies in parallel; each copy
chains one block per source edge.  In the block for edge ``{i, j}`` every
other class ``k`` has a direct edge of slope ``D / 4**k`` while classes
``i`` and ``j`` detour through a middle vertex whose outgoing edge carries
the source edge weight scaled by ``16**-(i+j)``.  Class ``k`` therefore has
one cheap path per copy, and the two copies play the two sides of the cut.
"""

from __future__ import annotations

from fractions import Fraction

from ..congestion import (CongestionGame, LinearLatency, Leaf, Player, check_profile,
                          parallel, series, sp_realize)
from ..errors import InvalidInstance, NotCanonical
from ..games_core import EdgeWeightedGraph, make_cut
from .common import SolutionMap

__all__ = ["reduce_mc_to_sp", "map_back_sp", "embed_cut_to_sp", "big_constant"]

COPIES = ("u", "l")


def big_constant(h: EdgeWeightedGraph):
    return 16 ** (h.n + 1) * max(w for _, _, w in h.edges)


def _block(copy, b, i, j, w, n, big):
    direct = [Leaf(LinearLatency(Fraction(big, 4 ** k), 0), ("direct", copy, b, k))
              for k in range(1, n + 1) if k not in (i, j)]
    entry = parallel(Leaf(LinearLatency(Fraction(big, 4 ** i), 0), ("in", copy, b, i)),
                     Leaf(LinearLatency(Fraction(big, 4 ** j), 0), ("in", copy, b, j)))
    detour = series(entry, Leaf(LinearLatency(Fraction(w, 16 ** (i + j)), 0), ("mid", copy, b)))
    return parallel(*direct, detour)


def reduce_mc_to_sp(h: EdgeWeightedGraph):
    """Compile ``h`` into ``(game, solution map)``."""
    if h.n < 2:
        raise InvalidInstance("the source graph needs at least two vertices")
    if h.m < 1:
        raise InvalidInstance("the source graph needs at least one edge")
    n = h.n
    big = big_constant(h)
    copies = []
    for copy in COPIES:
        blocks = [_block(copy, b, min(u, v) + 1, max(u, v) + 1, w, n, big)
                  for b, (u, v, w) in enumerate(h.edges)]
        copies.append(series(*blocks))
    net, o, d = sp_realize(parallel(*copies))
    where = {e.label: k for k, e in enumerate(net.edges)}

    def class_path(copy, k):
        path = []
        for b, (u, v, _) in enumerate(h.edges):
            if k in (u + 1, v + 1):
                path += [where[("in", copy, b, k)], where[("mid", copy, b)]]
            else:
                path.append(where[("direct", copy, b, k)])
        return path

    players = tuple(Player(16 ** k, o, d, ("class", k, r))
                    for k in range(1, n + 1) for r in range(3))
    game = CongestionGame(net, players)
    sm = SolutionMap("mc2sp", {
        "n": n,
        "D": str(big),
        "upper": [class_path("u", k) for k in range(1, n + 1)],
        "lower": [class_path("l", k) for k in range(1, n + 1)],
    })
    return game, sm


def embed_cut_to_sp(sm: SolutionMap, cut):
    """Side-1 vertices put two of their players on the upper path, others mirror."""
    cut = make_cut(cut)
    n = sm.data["n"]
    if len(cut) != n:
        raise InvalidInstance(f"cut has {len(cut)} labels, expected {n}")
    prof = []
    for k in range(n):
        up, low = tuple(sm.data["upper"][k]), tuple(sm.data["lower"][k])
        two, one = (up, low) if cut[k] == 1 else (low, up)
        prof += [two, two, one]
    return tuple(prof)


def map_back_sp(sm: SolutionMap, profile):
    """Vertex ``k`` is on side 1 iff two of its players use the upper path."""
    n = sm.data["n"]
    if len(profile) != 3 * n:
        raise NotCanonical(f"profile has {len(profile)} paths, expected {3 * n}")
    cut = []
    for k in range(n):
        up, low = tuple(sm.data["upper"][k]), tuple(sm.data["lower"][k])
        mine = [tuple(p) for p in profile[3 * k:3 * k + 3]]
        n_up = sum(p == up for p in mine)
        n_low = sum(p == low for p in mine)
        if n_up + n_low != 3 or n_up not in (1, 2):
            raise NotCanonical(f"class {k + 1} is not split two-to-one across its paths")
        cut.append(1 if n_up == 2 else 0)
    return tuple(cut)


def check_compiled(game, sm, profile):
    return check_profile(game, profile)
