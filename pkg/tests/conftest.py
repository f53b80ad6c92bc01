import random

import pytest
from hypothesis import strategies as st

from plsforge.congestion import CongestionGame, Edge, LinearLatency, Network, Player
from plsforge.games_core import EdgeWeightedGraph, VertexWeightedGraph

CRITERIA = {}


def record_criterion(number, passed, detail):
    CRITERIA[number] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA, key=str):
        passed, detail = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")


# ---------------------------------------------------------------- random instances

def random_nmc(rng, n, density=0.4, max_weight=10):
    weights = tuple(rng.randint(1, max_weight) for _ in range(n))
    edges = tuple((u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < density)
    return VertexWeightedGraph(weights, edges)


def random_mc(rng, n, density=0.4, max_weight=10):
    edges = tuple((u, v, rng.randint(1, max_weight))
                  for u in range(n) for v in range(u + 1, n) if rng.random() < density)
    return EdgeWeightedGraph(n, edges)


def random_cut(rng, n):
    return tuple(rng.randrange(2) for _ in range(n))


def random_game(rng, vertices=5, extra_edges=3, players=3, max_weight=4):
    """Connected multigraph (random spanning tree plus extra edges), linear latencies."""
    edges = []
    for v in range(1, vertices):
        edges.append((rng.randrange(v), v))
    for _ in range(extra_edges):
        u, v = rng.sample(range(vertices), 2)
        edges.append((u, v))
    net = Network(vertices, tuple(
        Edge(u, v, LinearLatency(rng.randint(0, 3), rng.randint(0, 5))) for u, v in edges))
    ps = []
    for _ in range(players):
        o, d = rng.sample(range(vertices), 2)
        ps.append(Player(rng.randint(1, max_weight), o, d))
    return CongestionGame(net, tuple(ps))


@st.composite
def nmc_graphs(draw, max_n=8, max_weight=2 ** 20):
    n = draw(st.integers(1, max_n))
    weights = draw(st.lists(st.integers(1, max_weight), min_size=n, max_size=n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return VertexWeightedGraph(tuple(weights), tuple(sorted(chosen)))


@st.composite
def graphs_with_cut(draw, max_n=8):
    g = draw(nmc_graphs(max_n=max_n))
    cut = tuple(draw(st.lists(st.integers(0, 1), min_size=g.n, max_size=g.n)))
    return g, cut


@pytest.fixture
def rng():
    return random.Random(20240611)
