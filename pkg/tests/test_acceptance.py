"""Acceptance suite: one test per criterion, each recording a pass/fail line.

The lines are printed in the terminal summary under "acceptance criteria".
"""

import itertools
import math
import random
import time
from fractions import Fraction

import pytest

from conftest import random_game, random_nmc, record_criterion
from plsforge.bridgegaps import run_bridgegaps
from plsforge.circuit import Circuit, all_inputs, is_flip_local_opt
from plsforge.congestion import (CongestionGame, Edge, LinearLatency, Network, Player,
                                 enumerate_paths, is_pne, is_pne_exhaustive, player_cost,
                                 potential_wcg, random_simple_path)
from plsforge.games_core import (EdgeWeightedGraph, VertexWeightedGraph, canonical_cut,
                                 is_approx_equilibrium_nmc, is_local_optimum, nmc_potential)
from plsforge.lemmas import LEMMAS, run_gadget_lemma
from plsforge.oracle import brute_local_optima, brute_pne, verify_reduction
from plsforge.reductions import (embed_cut_to_multi, n_min, reduce_cf_to_nmc, reduce_mc_to_sp,
                                 reduce_nmc_to_multi)

EPSILONS = (Fraction(1, 10), Fraction(1, 2), Fraction(1))


def report(number, failures, detail):
    record_criterion(number, not failures, detail)
    print(f"criterion {number}: {'PASS' if not failures else 'FAIL'} ({detail})")
    assert not failures, failures[:5]


# ---------------------------------------------------------------- criteria 1 and 2

def bridgegaps_corpus():
    rng = random.Random(1)
    corpus = []
    for k in range(200):
        n = rng.randint(2, 30)
        density = rng.choice((0.1, 0.3, 0.6, 1.0))
        weights = tuple(rng.randint(1, 2 ** rng.randint(1, 64)) for _ in range(n))
        edges = tuple((u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < density)
        corpus.append((VertexWeightedGraph(weights, edges), EPSILONS[k % 3]))
    return corpus


@pytest.fixture(scope="module")
def bridgegaps_runs():
    started = time.perf_counter()
    runs = [(g, eps, run_bridgegaps(g, eps)) for g, eps in bridgegaps_corpus()]
    return runs, time.perf_counter() - started


def test_criterion_1_bridgegaps_guarantee(bridgegaps_runs):
    runs, elapsed = bridgegaps_runs
    failures = [(g.n, eps) for g, eps, res in runs
                if not is_approx_equilibrium_nmc(g, res.cut, (1 + eps) ** 3 - 1)]
    if elapsed >= 60:
        failures.append(f"took {elapsed:.0f} s")
    report(1, failures, f"{len(runs)} instances, {len(failures)} violations, {int(elapsed)} s")


def replay_first_violator(g, bridged, eps):
    """Independent replay of the rounded-instance loop on bridged weights."""
    w = bridged
    h = g.with_weights(bridged)
    cut = [0] * g.n
    drops = []
    while True:
        for v in range(g.n):
            same = sum(w[u] for u in g.adj[v] if cut[u] == cut[v])
            other = sum(w[u] for u in g.adj[v] if cut[u] != cut[v])
            if same > (1 + eps) * other:
                before = nmc_potential(h, cut)
                cut[v] ^= 1
                drops.append(before - nmc_potential(h, cut))
                break
        else:
            return tuple(cut), drops


def test_criterion_2_bridgegaps_flip_bound(bridgegaps_runs):
    runs, _ = bridgegaps_runs
    failures = []
    total_flips = 0
    for g, eps, res in runs:
        bound = Fraction(g.m) / eps * math.ceil(g.n / eps) ** (2 * res.d_eps)
        if res.flips > bound:
            failures.append(("flip bound", g.n, eps, res.flips))
        cut, drops = replay_first_violator(g, res.grouped.bridged, eps)
        if cut != res.cut or len(drops) != res.flips:
            failures.append(("replay differs", g.n, eps))
        if any(d < eps for d in drops):
            failures.append(("small potential drop", g.n, eps, min(drops)))
        total_flips += res.flips
    report(2, failures, f"{len(runs)} instances, {total_flips} flips, every drop at least eps")


# ---------------------------------------------------------------- criterion 3

def rational_game(rng):
    game = random_game(rng, vertices=rng.randint(3, 6), extra_edges=rng.randint(0, 4),
                       players=rng.randint(1, 4))
    if rng.random() < 0.5:
        return game
    edges = tuple(Edge(e.u, e.v, LinearLatency(Fraction(rng.randint(0, 6), rng.randint(1, 4)),
                                               Fraction(rng.randint(0, 9), rng.randint(1, 3))))
                  for e in game.network.edges)
    players = tuple(Player(Fraction(rng.randint(1, 9), rng.randint(1, 4)), p.origin, p.destination)
                    for p in game.players)
    return CongestionGame(Network(game.network.num_vertices, edges), players)


def test_criterion_3_potential_identity():
    rng = random.Random(3)
    failures = []
    for _ in range(1000):
        game = rational_game(rng)
        prof = tuple(random_simple_path(game.network, p.origin, p.destination, rng)
                     for p in game.players)
        i = rng.randrange(game.num_players)
        p = game.players[i]
        alt = rng.choice(enumerate_paths(game.network, p.origin, p.destination))
        moved = prof[:i] + (alt,) + prof[i + 1:]
        d_phi = potential_wcg(game, moved) - potential_wcg(game, prof)
        d_cost = player_cost(game, moved, i) - player_cost(game, prof, i)
        if d_phi != 2 * p.weight * d_cost:
            failures.append((game, prof, i, alt))
    report(3, failures, f"1000 triples, {len(failures)} mismatches")


# ---------------------------------------------------------------- criteria 4 and 5

def connected_shapes():
    """One representative of every connected graph on 2 to 4 vertices."""
    shapes = []
    for n in (2, 3, 4):
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        seen = set()
        for k in range(n - 1, len(pairs) + 1):
            for edges in itertools.combinations(pairs, k):
                if not _connected(n, edges):
                    continue
                key = min(tuple(sorted(tuple(sorted((perm[u], perm[v]))) for u, v in edges))
                          for perm in itertools.permutations(range(n)))
                if key not in seen:
                    seen.add(key)
                    shapes.append((n, edges))
    return shapes


def _connected(n, edges):
    reach = {0}
    changed = True
    while changed:
        changed = False
        for u, v in edges:
            if (u in reach) != (v in reach):
                reach |= {u, v}
                changed = True
    return len(reach) == n


def weightings(rng, size, sample=40):
    """Every weight vector over 1..5 when there are at most 125, else a seeded sample."""
    if 5 ** size <= 125:
        return list(itertools.product(range(1, 6), repeat=size))
    return [tuple(rng.randint(1, 5) for _ in range(size)) for _ in range(sample)]


def test_criterion_4_mc2sp_bidirectional():
    rng = random.Random(4)
    shapes = connected_shapes()
    assert len(shapes) == 9
    failures, instances, unconverged = [], 0, 0
    for n, edges in shapes:
        for ws in weightings(rng, len(edges)):
            h = EdgeWeightedGraph(n, tuple((u, v, w) for (u, v), w in zip(edges, ws)))
            compiled = reduce_mc_to_sp(h)
            fwd = verify_reduction("mc2sp", h, compiled, "embed-check")
            back = verify_reduction("mc2sp", h, compiled, "dynamics-sample", seed=instances,
                                    runs=20)
            instances += 1
            unconverged += back.unconverged
            if not fwd.success or not back.success or back.unconverged:
                failures.append((h, fwd.counterexamples, back.counterexamples, back.unconverged))
    report(4, failures, f"{instances} graphs, {instances * 20} dynamics runs, "
                        f"{unconverged} unconverged")


def test_criterion_5_nmc2multi_bidirectional():
    rng = random.Random(5)
    failures, instances, exhaustive = [], 0, 0
    for n, edges in connected_shapes():
        for ws in weightings(rng, n):
            h = VertexWeightedGraph(ws, edges)
            compiled = reduce_nmc_to_multi(h)
            fwd = verify_reduction("nmc2multi", h, compiled, "embed-check")
            back = verify_reduction("nmc2multi", h, compiled, "dynamics-sample", seed=instances,
                                    runs=20)
            instances += 1
            bad = list(fwd.counterexamples) + list(back.counterexamples)
            if back.unconverged:
                bad.append(("unconverged runs", back.unconverged))
            if n <= 3:
                # cross-check the forward direction against every alternative path
                game, sm = compiled
                for cut in brute_local_optima(h):
                    exhaustive += 1
                    if not is_pne_exhaustive(game, embed_cut_to_multi(sm, cut)):
                        bad.append(("embedding fails the exhaustive check", cut))
            if bad:
                failures.append((h, bad))
    report(5, failures, f"{instances} graphs, complementary players checked at every "
                        f"reached equilibrium, {exhaustive} embeddings checked exhaustively")


# ---------------------------------------------------------------- criterion 6

REFERENCE_CIRCUIT = Circuit(1, ((1, "x1", "x1"),), (1,))


def test_criterion_6_gadget_lemmas():
    base = n_min(REFERENCE_CIRCUIT)
    failures, modes = [], set()
    for N in (base, base + 2):
        for name in LEMMAS:
            res = run_gadget_lemma(name, N=N, mode="auto")
            modes |= res.modes
            if not res.passed:
                failures.append((name, N, res.failures[:3]))
    report(6, failures, f"{len(LEMMAS)} lemmas at N={base} and N={base + 2}, "
                        f"modes used: {', '.join(sorted(modes))}")


# ---------------------------------------------------------------- criterion 7

def _c(n, gates, outputs):
    return Circuit(n, tuple(gates), tuple(outputs))


CIRCUIT_CORPUS = {
    "not": _c(1, [(1, "x1", "x1")], [1]),
    "nor2": _c(2, [(1, "x1", "x2")], [1]),
    "not-first": _c(2, [(1, "x1", "x1")], [1]),
    "not-last": _c(2, [(1, "x2", "x2")], [1]),
    "nor-outer": _c(3, [(1, "x1", "x3")], [1]),
    "buffer": _c(1, [(1, "x1", "x1"), (2, "g1", "g1")], [2]),
    "or2": _c(2, [(1, "x1", "x2"), (2, "g1", "g1")], [2]),
    "two-nots": _c(2, [(1, "x1", "x1"), (2, "x2", "x2")], [1, 2]),
    "nor-chain3": _c(3, [(1, "x1", "x2"), (2, "g1", "x3")], [2]),
    "not-and-nor": _c(1, [(1, "x1", "x1"), (2, "x1", "g1")], [1, 2]),
    "nor-pair": _c(2, [(1, "x1", "x2"), (2, "x1", "g1"), (3, "g1", "x2")], [2, 3]),
    "and2": _c(2, [(1, "x1", "x1"), (2, "x2", "x2"), (3, "g1", "g2")], [3]),
    "and-or": _c(2, [(1, "x1", "x2"), (2, "x1", "x1"), (3, "x2", "x2")], [1, 2, 3]),
    "maj-ish": _c(3, [(1, "x1", "x2"), (2, "x2", "x3"), (3, "g1", "g2")], [3]),
    "buffer3": _c(1, [(1, "x1", "x1"), (2, "g1", "g1"), (3, "g2", "g2")], [3, 1]),
    "xnor2": _c(2, [(1, "x1", "x2"), (2, "x1", "g1"), (3, "x2", "g1"), (4, "g2", "g3")], [4]),
    "pass2": _c(2, [(1, "x1", "x1"), (2, "g1", "g1"), (3, "x2", "x2"), (4, "g3", "g3")], [2, 4]),
    "chain5": _c(3, [(1, "x1", "x2"), (2, "g1", "x3"), (3, "g2", "g1"), (4, "g3", "x1"),
                     (5, "g4", "g2")], [5, 3]),
    "mixed5": _c(2, [(1, "x1", "x2"), (2, "g1", "x1"), (3, "g1", "x2"), (4, "g2", "g3"),
                     (5, "g4", "g4")], [5, 1]),
    "six": _c(3, [(1, "x1", "x2"), (2, "x2", "x3"), (3, "g1", "g2"), (4, "g3", "x1"),
                  (5, "g4", "g3"), (6, "g5", "x3")], [6, 4]),
}

DYNAMICS_RUNS = 2
STEP_CAP = 10 ** 6


@pytest.fixture(scope="module")
def compiled_corpus():
    out = {}
    for name, c in CIRCUIT_CORPUS.items():
        N = n_min(c)
        out[name] = (c, reduce_cf_to_nmc(c, N))
    return out


def test_criterion_7_corpus_shape():
    assert len(CIRCUIT_CORPUS) == 20
    for c in CIRCUIT_CORPUS.values():
        assert c.n <= 3 and len(c.gates) <= 6


def test_criterion_7a_intended_configurations_are_local_optima(compiled_corpus):
    failures, checked = [], 0
    for name, (c, compiled) in compiled_corpus.items():
        rep = verify_reduction("cf2nmc", c, compiled, "embed-check", instance=name)
        expected = sum(1 for s in all_inputs(c.n) if is_flip_local_opt(c, s))
        checked += rep.checked
        if not rep.success or rep.checked != expected:
            failures.append((name, rep.counterexamples[:2]))
    record_criterion("7a", not failures, f"{len(compiled_corpus)} circuits, {checked} inputs")
    print(f"criterion 7a: {'PASS' if not failures else 'FAIL'}")
    assert not failures, failures


def test_criterion_7b_dynamics_map_back_to_flip_local_optima(compiled_corpus):
    failures, converged, unconverged = [], 0, 0
    for k, (name, (c, compiled)) in enumerate(compiled_corpus.items()):
        rep = verify_reduction("cf2nmc", c, compiled, "dynamics-sample", seed=k,
                               runs=DYNAMICS_RUNS, max_steps=STEP_CAP, instance=name)
        converged += rep.checked
        unconverged += rep.unconverged          # reported, not failed
        for problem in rep.counterexamples:
            failures.append((name, problem))
    detail = (f"{converged} converged runs, {unconverged} hit the cap, "
              f"{len(failures)} mapped to non-optimal inputs: "
              + ", ".join(f"{n}->{''.join(map(str, p[1]))}" for n, p in failures))
    record_criterion("7b", not failures, detail)
    print(f"criterion 7b: {'PASS' if not failures else 'FAIL'} ({detail})")
    assert not failures, detail


# ---------------------------------------------------------------- criterion 8

def small_game(rng):
    return random_game(rng, vertices=rng.randint(3, 5), extra_edges=rng.randint(0, 3),
                       players=rng.randint(1, 3))


def test_criterion_8_oracle_agreement():
    rng = random.Random(8)
    failures, cuts, profiles = [], 0, 0
    for k in range(1000):
        if k % 2 == 0:
            g = random_nmc(rng, rng.randint(1, 12), density=rng.choice((0.2, 0.5, 0.8)))
            optima = brute_local_optima(g)
            for _ in range(3):
                cut = tuple(rng.randrange(2) for _ in range(g.n))
                cuts += 1
                if is_local_optimum(g, cut) != (canonical_cut(cut) in optima):
                    failures.append(("cut", g, cut))
        else:
            game = small_game(rng)
            eqs = brute_pne(game)
            paths = [enumerate_paths(game.network, p.origin, p.destination) for p in game.players]
            for prof in itertools.product(*paths):
                profiles += 1
                if is_pne(game, prof) != (prof in eqs):
                    failures.append(("profile", game, prof))
    report(8, failures, f"1000 instances, {cuts} cuts and {profiles} profiles compared")
