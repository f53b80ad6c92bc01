from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import graphs_with_cut, nmc_graphs
from plsforge.errors import InvalidArgument, InvalidInstance
from plsforge.games_core import (EdgeWeightedGraph, VertexWeightedGraph, bias, canonical_cut,
                                 cut_value, flip, flip_dynamics, flip_gain,
                                 is_approx_equilibrium_nmc, is_local_optimum, make_cut,
                                 nmc_edge_weight, nmc_potential, total_weight)

TRIANGLE = VertexWeightedGraph((1, 1, 1), ((0, 1), (1, 2), (0, 2)))
K2 = VertexWeightedGraph((1, 1), ((0, 1),))


@pytest.mark.parametrize("wu, wv, expected", [(1, 1, 1), (3, 5, 15), (Fraction(1, 2), 4, 2)])
def test_nmc_edge_weight_is_the_product(wu, wv, expected):
    g = VertexWeightedGraph((wu, wv), ((0, 1),))
    assert nmc_edge_weight(g, 0, 1) == expected


def test_cut_value_examples():
    assert cut_value(TRIANGLE, (1, 0, 0)) == 2
    assert cut_value(TRIANGLE, (0, 0, 0)) == 0
    k4 = VertexWeightedGraph((1, 2, 3, 4), tuple((u, v) for u in range(4) for v in range(u + 1, 4)))
    assert cut_value(k4, (0, 0, 1, 1)) == 1 * 3 + 1 * 4 + 2 * 3 + 2 * 4


def test_flip_gain_examples():
    isolated = VertexWeightedGraph((5,), ())
    assert flip_gain(isolated, (0,), 0) == 0
    assert flip_gain(K2, (0, 0), 0) == 1
    assert flip_gain(K2, (0, 0), 1) == 1
    star = VertexWeightedGraph((1, 1, 1, 1), ((0, 1), (0, 2), (0, 3)))
    assert flip_gain(star, (0, 0, 0, 0), 0) == 3


def test_local_optimum_examples():
    assert is_local_optimum(K2, (0, 1))
    assert not is_local_optimum(K2, (0, 0))
    path = VertexWeightedGraph((1, 3, 1), ((0, 1), (1, 2)))
    assert is_local_optimum(path, (0, 1, 0))


def test_approximate_equilibrium_is_a_single_ratio_test():
    # vertex 0 has same-side weight 3 and opposite-side weight 2; vertex 3
    # keeps vertex 1 content so that only vertex 0 is at stake
    g = VertexWeightedGraph((1, 3, 2, 10), ((0, 1), (0, 2), (1, 3)))
    cut = (0, 0, 1, 1)
    assert not is_approx_equilibrium_nmc(g, cut, 0)
    assert is_approx_equilibrium_nmc(g, cut, Fraction(1, 2))
    assert not is_approx_equilibrium_nmc(g, cut, Fraction(1, 4))


def test_bias_examples():
    g = VertexWeightedGraph((1, 3, 5), ((0, 1), (0, 2)))
    assert bias(g, (0, 1, 0), 0, subset=()) == 0
    assert bias(g, (0, 1, 0), 0, subset=(1, 2)) == 2
    h = VertexWeightedGraph((1, 4, 4), ((0, 1), (0, 2)))
    assert bias(h, (0, 1, 0), 0) == 0


def test_potential_examples():
    assert nmc_potential(TRIANGLE, (0, 0, 0)) == 3
    assert nmc_potential(VertexWeightedGraph((1, 2, 3), ()), (0, 1, 0)) == 0
    k2 = VertexWeightedGraph((2, 3), ((0, 1),))
    assert nmc_potential(k2, (0, 0)) == 6
    assert nmc_potential(k2, (0, 1)) == 0


def test_invalid_graphs_are_rejected():
    with pytest.raises(InvalidInstance):
        VertexWeightedGraph((1, 1), ((0, 0),))
    with pytest.raises(InvalidInstance):
        VertexWeightedGraph((1, 1), ((0, 2),))
    with pytest.raises(InvalidInstance):
        VertexWeightedGraph((1, 1), ((0, 1), (1, 0)))
    with pytest.raises(InvalidArgument):
        VertexWeightedGraph((0, 1), ((0, 1),))


def test_cut_helpers():
    assert make_cut("0110") == (0, 1, 1, 0)
    assert canonical_cut((1, 0, 1)) == (0, 1, 0)
    assert flip((0, 1, 1), 2) == (0, 1, 0)


def test_flip_dynamics_reaches_a_local_optimum_under_both_schedules():
    g = VertexWeightedGraph((1, 2, 3, 4, 5), ((0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)))
    for schedule in ("max-gain", "fifo"):
        cut, flips, converged = flip_dynamics(g, (0,) * 5, schedule=schedule)
        assert converged and is_local_optimum(g, cut) and flips > 0


def test_frozen_vertices_never_move():
    cut, _, _ = flip_dynamics(K2, (0, 0), frozen=(0, 1))
    assert cut == (0, 0)


@settings(max_examples=150, deadline=None)
@given(graphs_with_cut())
def test_cut_value_plus_potential_is_total_weight(data):
    g, cut = data
    assert cut_value(g, cut) + nmc_potential(g, cut) == total_weight(g)


@settings(max_examples=150, deadline=None)
@given(graphs_with_cut())
def test_values_are_complement_invariant(data):
    g, cut = data
    other = tuple(1 - b for b in cut)
    assert cut_value(g, cut) == cut_value(g, other)
    assert is_local_optimum(g, cut) == is_local_optimum(g, other)


@settings(max_examples=150, deadline=None)
@given(graphs_with_cut())
def test_flip_gain_matches_a_recount(data):
    g, cut = data
    for v in range(g.n):
        assert flip_gain(g, cut, v) == cut_value(g, flip(cut, v)) - cut_value(g, cut)
    assert is_local_optimum(g, cut) == all(flip_gain(g, cut, v) <= 0 for v in range(g.n))


@settings(max_examples=60, deadline=None)
@given(nmc_graphs(max_n=10))
def test_node_weighted_and_edge_weighted_views_agree(g):
    h = g.as_edge_weighted()
    assert isinstance(h, EdgeWeightedGraph)
    cut, _, _ = flip_dynamics(g, (0,) * g.n)
    assert cut_value(g, cut) == cut_value(h, cut)
    assert is_local_optimum(g, cut) and is_local_optimum(h, cut)
