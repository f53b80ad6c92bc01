from fractions import Fraction
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plsforge.circuit import Circuit, all_inputs, is_flip_local_opt
from plsforge.congestion import enumerate_paths, is_pne, player_cost
from plsforge.errors import InvalidArgument, InvalidInstance, NotCanonical, ScaleTooSmall
from plsforge.games_core import EdgeWeightedGraph, VertexWeightedGraph, is_local_optimum
from plsforge.oracle import pinned_local_optima
from plsforge.reductions import (build_leverage, complementary_on_middle, embed_cut_to_multi,
                                 embed_cut_to_sp, expected_vertex_count, intended_configuration,
                                 leverage_biases, leverage_weights, map_back_cf, map_back_multi,
                                 map_back_sp, n_min, reduce_cf_to_nmc, reduce_mc_to_sp,
                                 reduce_nmc_to_multi)
from plsforge.reductions.nmc2multi import intended_path_cost, multi_constants

K2_MC = EdgeWeightedGraph(2, ((0, 1, 5),))
NOT1 = Circuit(1, ((1, "x1", "x1"),), (1,))


# ---------------------------------------------------------------- mc2sp

def test_mc2sp_two_vertex_example():
    game, sm = reduce_mc_to_sp(K2_MC)
    assert [p.weight for p in game.players] == [16, 16, 16, 256, 256, 256]
    assert int(sm.data["D"]) == 16 ** 3 * 5 == 20480
    # two parallel copies, each a single block of three edges and two paths
    assert len(game.network.edges) == 6
    assert len(enumerate_paths(game.network, 0, 1)) == 4


def test_mc2sp_four_vertex_example():
    h = EdgeWeightedGraph(4, ((0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)))
    game, sm = reduce_mc_to_sp(h)
    assert game.num_players == 12
    assert int(sm.data["D"]) == 16 ** 5
    assert len(enumerate_paths(game.network, 0, 1)) == 2 * 4 ** 4


def test_mc2sp_embeds_and_maps_back():
    game, sm = reduce_mc_to_sp(K2_MC)
    for cut in ((1, 0), (0, 1), (0, 0)):
        prof = embed_cut_to_sp(sm, cut)
        for k in range(2):
            up = tuple(sm.data["upper"][k])
            on_up = sum(tuple(p) == up for p in prof[3 * k:3 * k + 3])
            assert on_up == (2 if cut[k] else 1)
        assert map_back_sp(sm, prof) == cut


def test_mc2sp_rejects_uncanonical_profiles():
    game, sm = reduce_mc_to_sp(K2_MC)
    up = tuple(sm.data["upper"][0])
    prof = list(embed_cut_to_sp(sm, (0, 0)))
    prof[0:3] = [up, up, up]
    with pytest.raises(NotCanonical):
        map_back_sp(sm, tuple(prof))
    with pytest.raises(InvalidInstance):
        reduce_mc_to_sp(EdgeWeightedGraph(1, ()))


# ---------------------------------------------------------------- nmc2multi

def test_multi_constants_example():
    assert multi_constants(VertexWeightedGraph((1, 1), ((0, 1),))) == (2, 16, 128)


def test_intended_route_costs():
    h = VertexWeightedGraph((1, 2, 3), ())
    game, sm = reduce_nmc_to_multi(h)
    _, d, big = multi_constants(h)
    for cut in all_inputs(3):
        prof = embed_cut_to_multi(sm, cut)
        for i in range(3):
            expected = intended_path_cost(3, i + 1, d, big) + h.weights[i] * len(prof[i])
            assert player_cost(game, prof, i) == expected


def test_multi_counts_one_extra_player_per_constant():
    h = VertexWeightedGraph((1, 2, 3), ((0, 1), (1, 2)))
    game, sm = reduce_nmc_to_multi(h)
    assert game.num_players == 3 + len(sm.data["middle"])
    consts = [p for p in game.players if p.label and p.label[0] == "const"]
    assert len(consts) == len(sm.data["middle"])


def test_multi_map_back_inspects_primaries_only():
    h = VertexWeightedGraph((1, 1), ((0, 1),))
    game, sm = reduce_nmc_to_multi(h)
    prof = embed_cut_to_multi(sm, (1, 0))
    assert map_back_multi(sm, prof) == (1, 0) and complementary_on_middle(sm, prof)
    # move one complementary player off its middle edge: primaries still read fine
    t = 0
    k = sm.data["middle"][t]
    p = game.players[2 + t]
    detour = next(q for q in enumerate_paths(game.network, p.origin, p.destination) if q != (k,))
    moved = prof[:2 + t] + (detour,) + prof[3 + t:]
    assert map_back_multi(sm, moved) == (1, 0) and not complementary_on_middle(sm, moved)
    with pytest.raises(NotCanonical):
        map_back_multi(sm, (prof[1],) + prof[1:])


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 3), st.randoms(use_true_random=False))
def test_multi_embedding_is_an_equilibrium_exactly_at_local_optima(n, rnd):
    weights = tuple(rnd.randint(1, 5) for _ in range(n))
    edges = tuple((u, v) for u in range(n) for v in range(u + 1, n) if rnd.random() < 0.7)
    h = VertexWeightedGraph(weights, edges)
    game, sm = reduce_nmc_to_multi(h)
    for cut in all_inputs(n):
        assert is_pne(game, embed_cut_to_multi(sm, cut)) == is_local_optimum(h, cut)


# ---------------------------------------------------------------- leverage

def test_leverage_formulas():
    eps = Fraction(1, 1000)
    ch = leverage_weights(8, 64, 2, eps)
    assert ch.blocks == 3
    assert ch.odd[0] == Fraction(64, 2 ** 3) + eps
    assert leverage_biases(8, 64, 2, eps) == (Fraction(8, 4) - 2 * eps, Fraction(64, 4) + 2 * eps)
    assert leverage_biases(8, 64, 0, eps) == (8 - 2 * eps, 64 + 2 * eps)
    with pytest.raises(InvalidArgument):
        leverage_weights(1, 8, 3, 1)


def test_leverage_output_bias_is_the_light_weight_scaled_down_by_two_eps():
    # the magnitude of the correction is 2 eps; its direction is recorded in the ledger
    eps = Fraction(1, 1000)
    target, source = leverage_biases(8, 64, 2, eps)
    assert abs(target - Fraction(8, 4)) == 2 * eps
    assert abs(source - Fraction(64, 4)) == 2 * eps


@pytest.mark.parametrize("x", [0, 1, 2])
def test_leverage_chain_settles_as_claimed(x):
    eps = Fraction(1, 64)
    g, ch, index = build_leverage(8, 64, x, eps)
    for a in (0, 1):
        for b in (0, 1):
            found = pinned_local_optima(g, {0: a, 1: b}, mode="exhaustive")
            assert found.complete and len(found.assignments) == 1
            side = found.assignments[0]
            for (k, j), v in index.items():
                assert side[v] == (1 - a if j in (1, 2) else a)
            # push on B away from A and on A toward staying, measured directly
            away = sum(g.weights[u] * (1 if side[u] == a else -1) for u in g.adj[1] if u != 0)
            stay = sum(g.weights[u] * (1 if side[u] != a else -1) for u in g.adj[0])
            assert (away, stay) == leverage_biases(8, 64, x, eps)


# ---------------------------------------------------------------- cf2nmc

@pytest.fixture(scope="module")
def compiled_not():
    N = n_min(NOT1)
    g, sm = reduce_cf_to_nmc(NOT1, N)
    return N, g, sm


def test_cf2nmc_structure(compiled_not):
    N, g, sm = compiled_not
    assert sm.data["N"] == N == sm.data["n_min"]
    assert g.n == expected_vertex_count(NOT1, N)
    assert len(sm.data["roles"]) == g.n
    one, zero = sm.data["super_one"], sm.data["super_zero"]
    assert g.has_edge(one, zero)
    assert sum(1 for u in g.adj[one] if u == zero) == 1
    assert max(g.weights) in (g.weights[one], g.weights[zero])


def test_cf2nmc_rejects_small_scales():
    with pytest.raises(ScaleTooSmall):
        reduce_cf_to_nmc(NOT1, n_min(NOT1) - 1)


def test_cf2nmc_reading_is_relative_to_super_one(compiled_not):
    _, g, sm = compiled_not
    rng = random.Random(5)
    for _ in range(5):
        cut = tuple(rng.randrange(2) for _ in range(g.n))
        assert map_back_cf(sm, cut) == map_back_cf(sm, tuple(1 - b for b in cut))


def test_cf2nmc_intended_configuration_is_a_local_optimum(compiled_not):
    _, g, sm = compiled_not
    for s in all_inputs(1):
        if is_flip_local_opt(NOT1, s):
            cut = intended_configuration(NOT1, g, sm, s)
            assert is_local_optimum(g, cut)
            assert map_back_cf(sm, cut) == s
            one, zero = sm.data["super_one"], sm.data["super_zero"]
            assert cut[one] != cut[zero]
