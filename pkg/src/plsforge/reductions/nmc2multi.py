"""Node-Max-Cut to multi-commodity congestion games with identity latencies.

Layout (rows and columns 1-based, row 1 on top).  Each of the two parts is a
staircase half-grid whose row ``r`` holds columns ``1..r``.  Origin ``o_i``
attaches to ``(i, 1)`` and destination ``d_i`` to ``(n, i)`` in both parts.
Player ``i``'s cheap route runs right along row ``i`` to the diagonal and
then straight down column ``i``.  Routes of players ``i < j`` cross at
``(j, i)``; when ``{i, j}`` is a source edge that vertex is split in two and
joined by a private identity edge both players must share.

Constant latencies are simulated: an edge that should cost a constant
``c`` becomes a three-edge path whose middle edge is owned by an extra
player of weight ``c``.  Horizontal edges on row ``i`` use ``c = i * d``,
every other edge uses ``c = D``, with ``w`` the total vertex weight,
``d = n**3 * w`` and ``D = n**3 * d``.
"""

from __future__ import annotations

from ..congestion import CongestionGame, Edge, Network, Player
from ..errors import InvalidInstance, NotCanonical
from ..games_core import VertexWeightedGraph, make_cut
from .common import SolutionMap

__all__ = ["reduce_nmc_to_multi", "map_back_multi", "embed_cut_to_multi",
           "multi_constants", "intended_path_cost", "complementary_on_middle"]

PARTS = ("u", "l")


def multi_constants(h: VertexWeightedGraph):
    """``(w, d, D)`` for the source instance."""
    n = h.n
    w = sum(h.weights)
    d = n ** 3 * w
    return w, d, n ** 3 * d


def intended_path_cost(n, i, d, big):
    """Constant part of either cheap route of player ``i`` (1-based)."""
    return 2 * big + i * (i - 1) * d + (n - i) * big


class _Builder:
    def __init__(self):
        self.ids = {}
        self.edges = []
        self.links = {}
        self.players = []
        self.middles = []

    def vertex(self, name):
        if name not in self.ids:
            self.ids[name] = len(self.ids)
        return self.ids[name]

    def link(self, a, b, const, label):
        """Join named vertices ``a`` and ``b``; ``const`` None means a plain identity edge."""
        va, vb = self.vertex(a), self.vertex(b)
        if const is None:
            ks = [self._edge(va, vb, label)]
        else:
            oc = self.vertex(("co", label))
            dc = self.vertex(("cd", label))
            ks = [self._edge(va, oc, label + ("in",)),
                  self._edge(oc, dc, label + ("mid",)),
                  self._edge(dc, vb, label + ("out",))]
            self.players.append(Player(const, oc, dc, ("const",) + label))
            self.middles.append(ks[1])
        self.links[(a, b)] = ks
        self.links[(b, a)] = ks[::-1]

    def _edge(self, u, v, label):
        self.edges.append(Edge(u, v, label=label))
        return len(self.edges) - 1


def reduce_nmc_to_multi(h: VertexWeightedGraph):
    """Compile ``h`` into ``(game, solution map)``."""
    n = h.n
    if n < 2:
        raise InvalidInstance("the source graph needs at least two vertices")
    _, d, big = multi_constants(h)
    split = {(max(u, v) + 1, min(u, v) + 1) for u, v in h.edges}   # (row, col)
    b = _Builder()

    def node(part, r, c, end):
        # ``end`` is "in" for links from above, the left or the origin and
        # "out" for links downward, to the right or to the destination
        if (r, c) in split:
            return ("grid", part, r, c, end)
        return ("grid", part, r, c)

    # primary endpoints first so o_i and d_i get small ids
    for i in range(1, n + 1):
        b.vertex(("o", i))
        b.vertex(("d", i))
    for part in PARTS:
        for r in range(1, n + 1):
            for c in range(1, r + 1):
                if (r, c) in split:
                    b.link(node(part, r, c, "in"), node(part, r, c, "out"), None,
                           ("shared", part, r, c))
        for i in range(1, n + 1):
            b.link(("o", i), node(part, i, 1, "in"), big, ("origin", part, i))
            b.link(node(part, n, i, "out"), ("d", i), big, ("dest", part, i))
        for r in range(1, n + 1):
            for c in range(1, r):
                b.link(node(part, r, c, "out"), node(part, r, c + 1, "in"), r * d,
                       ("row", part, r, c))
        for r in range(1, n):
            for c in range(1, r + 1):
                b.link(node(part, r, c, "out"), node(part, r + 1, c, "in"), big,
                       ("col", part, r, c))

    def route(part, i):
        stops = [("o", i)]
        cells = [(i, c) for c in range(1, i + 1)] + [(r, i) for r in range(i + 1, n + 1)]
        for r, c in cells:
            if (r, c) in split:
                stops += [node(part, r, c, "in"), node(part, r, c, "out")]
            else:
                stops.append(node(part, r, c, "in"))
        stops.append(("d", i))
        path = []
        for a, z in zip(stops, stops[1:]):
            path += b.links[(a, z)]
        return path

    primaries = [Player(w, b.ids[("o", i)], b.ids[("d", i)], ("primary", i))
                 for i, w in enumerate(h.weights, start=1)]
    net = Network(len(b.ids), tuple(b.edges))
    game = CongestionGame(net, tuple(primaries) + tuple(b.players))
    sm = SolutionMap("nmc2multi", {
        "n": n,
        "d": str(d),
        "D": str(big),
        "upper": [route("u", i) for i in range(1, n + 1)],
        "lower": [route("l", i) for i in range(1, n + 1)],
        "middle": list(b.middles),
    })
    return game, sm


def embed_cut_to_multi(sm: SolutionMap, cut):
    """Side-1 vertices take the upper route; extra players sit on their middle edge."""
    cut = make_cut(cut)
    n = sm.data["n"]
    if len(cut) != n:
        raise InvalidInstance(f"cut has {len(cut)} labels, expected {n}")
    prof = [tuple(sm.data["upper"][i] if cut[i] else sm.data["lower"][i]) for i in range(n)]
    prof += [(k,) for k in sm.data["middle"]]
    return tuple(prof)


def map_back_multi(sm: SolutionMap, profile):
    """Vertex ``i`` is on side 1 iff player ``i`` takes its upper route.

    Only the primary players are inspected.
    """
    n = sm.data["n"]
    cut = []
    for i in range(n):
        p = tuple(profile[i])
        if p == tuple(sm.data["upper"][i]):
            cut.append(1)
        elif p == tuple(sm.data["lower"][i]):
            cut.append(0)
        else:
            raise NotCanonical(f"player {i + 1} is on neither of its two routes")
    return tuple(cut)


def complementary_on_middle(sm: SolutionMap, profile) -> bool:
    n = sm.data["n"]
    return all(tuple(profile[n + t]) == (k,) for t, k in enumerate(sm.data["middle"]))
