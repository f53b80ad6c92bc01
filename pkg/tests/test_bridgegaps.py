from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import nmc_graphs
from plsforge.bridgegaps import (BridgeGaps, bridge_gaps, bridgegaps_solve,
                                 check_cross_group_domination, flip_bound, floor_log,
                                 group_weights, round_weights, run_bridgegaps)
from plsforge.errors import InvalidArgument
from plsforge.games_core import VertexWeightedGraph, is_approx_equilibrium_nmc, nmc_potential

PATH3 = VertexWeightedGraph((1, 2, 64), ((0, 1), (1, 2)))


def test_rounding_down_to_powers():
    assert 2 ** floor_log(8, 2) == 8
    assert 2 ** floor_log(10, 2) == 8
    for eps in (Fraction(1, 10), Fraction(1, 2), 1):
        assert floor_log(1, 1 + eps) == 0
    assert floor_log(Fraction(1, 3), 2) == -2
    with pytest.raises(InvalidArgument):
        floor_log(0, 2)


def test_grouping_example():
    gr = group_weights(round_weights(PATH3, 1))
    assert gr.threshold == 3
    assert gr.groups == ((0, 1), (2,))


def test_grouping_edge_cases():
    same = VertexWeightedGraph((5, 5, 5), ())
    assert len(group_weights(round_weights(same, 1)).groups) == 1
    # threshold ceil(2/1) = 2 and ratio exactly 2: the test is inclusive
    pair = VertexWeightedGraph((1, 2), ((0, 1),))
    assert group_weights(round_weights(pair, 1)).groups == ((0, 1),)


def test_bridging_example():
    gr = bridge_gaps(group_weights(round_weights(PATH3, 1)))
    assert gr.divisors == (Fraction(32, 3),)
    assert gr.bridged == (1, 2, 6)
    assert max(gr.bridged) <= 3 ** round_weights(PATH3, 1).d_eps


def test_single_group_is_left_alone():
    g = VertexWeightedGraph((3, 4, 5), ((0, 1),))
    gr = bridge_gaps(group_weights(round_weights(g, 1)))
    assert gr.bridged == gr.rounded.weights and gr.divisors == ()


def test_solver_examples():
    k2 = VertexWeightedGraph((1, 1), ((0, 1),))
    assert bridgegaps_solve(k2, Fraction(1, 2), start=(0, 1)) == ((0, 1), 0)
    for eps in (Fraction(1, 10), 1, 3):
        cut, flips = bridgegaps_solve(k2, eps, start=(0, 0))
        assert flips == 1 and cut[0] != cut[1]
    with pytest.raises(InvalidArgument):
        bridgegaps_solve(k2, 0)
    with pytest.raises(InvalidArgument):
        bridgegaps_solve(k2, Fraction(-1, 2))


def test_flip_bound_formula():
    assert flip_bound(3, Fraction(1, 2), 6, 2) == 6 * 6 ** 4


def test_estimator_parameters():
    est = BridgeGaps(eps=Fraction(1, 3))
    assert est.get_params() == {"eps": Fraction(1, 3), "schedule": "first", "delta_variant": False}
    est.set_params(schedule="max-gain", delta_variant=True)
    assert est.get_params()["schedule"] == "max-gain"
    with pytest.raises(InvalidArgument):
        est.set_params(alpha=2)
    est.fit(PATH3)
    assert est.result_.verified and est.cut_ == est.result_.cut and est.flips_ == est.result_.flips


EPS = st.sampled_from((Fraction(1, 10), Fraction(1, 2), Fraction(1), Fraction(2, 3)))


@settings(max_examples=80, deadline=None)
@given(nmc_graphs(max_n=12, max_weight=2 ** 40), EPS)
def test_rounding_sandwich(g, eps):
    r = round_weights(g, eps)
    for w, w_round in zip(g.weights, r.original_scale_weights):
        assert w_round <= w < (1 + eps) * w_round
    assert min(r.weights) == 1


@settings(max_examples=80, deadline=None)
@given(nmc_graphs(max_n=12, max_weight=2 ** 40), EPS, st.booleans())
def test_seams_and_cross_group_domination(g, eps, delta_variant):
    gr = bridge_gaps(group_weights(round_weights(g, eps), eps, delta_variant))
    size = max(g.max_degree(), 1) if delta_variant else g.n
    assert check_cross_group_domination(gr, eps, size)
    for lower, upper in zip(gr.groups, gr.groups[1:]):
        ratio = min(gr.bridged[v] for v in upper) / max(gr.bridged[v] for v in lower)
        assert ratio == gr.threshold


@settings(max_examples=80, deadline=None)
@given(nmc_graphs(max_n=12, max_weight=2 ** 40), EPS, st.sampled_from(("first", "max-gain")),
       st.booleans())
def test_output_is_a_cubed_approximate_equilibrium(g, eps, schedule, delta_variant):
    res = run_bridgegaps(g, eps, schedule=schedule, delta_variant=delta_variant)
    assert res.verified
    assert is_approx_equilibrium_nmc(g, res.cut, (1 + eps) ** 3 - 1)
    assert res.flips <= res.bound
    assert all(drop >= eps for drop in res.potential_drops)
    bridged = g.with_weights(res.grouped.bridged)
    # the flips carry the bridged potential down by exactly the recorded drops
    start = nmc_potential(bridged, (0,) * g.n)
    assert start - nmc_potential(bridged, res.cut) == sum(res.potential_drops)
