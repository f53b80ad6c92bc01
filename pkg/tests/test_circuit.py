import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plsforge.circuit import (Circuit, all_inputs, augment_next_val, bits_to_int, eval_circuit,
                              eval_gates, int_to_bits, is_flip_local_opt, real_next, real_val,
                              reverse_topological_order)
from plsforge.errors import InvalidInstance

NOT1 = Circuit(1, ((1, "x1", "x1"),), (1,))
NOR2 = Circuit(2, ((1, "x1", "x2"),), (1,))
CHAIN = Circuit(2, ((1, "x1", "x2"), (2, "g1", "g1")), (2,))
# value = the input read as a binary number, through two NOR inverters per bit
PASS2 = Circuit(2, ((1, "x1", "x1"), (2, "g1", "g1"), (3, "x2", "x2"), (4, "g3", "g3")), (2, 4))
CONST = Circuit(2, ((1, "x1", "x1"), (2, "x1", "g1")), (2,))


def test_nor_truth_table():
    assert eval_circuit(NOT1, (0,)) == (1,)
    assert eval_circuit(NOT1, (1,)) == (0,)
    assert eval_circuit(NOR2, (1, 1)) == (0,)
    assert [eval_circuit(NOR2, s)[0] for s in all_inputs(2)] == [1, 0, 0, 0]


def test_chain_evaluation():
    values = eval_gates(CHAIN, (0, 0))
    assert values[1] == 1 and values[2] == 0


def test_binary_encoding():
    assert bits_to_int((1, 0, 1)) == 5
    assert bits_to_int((0, 0, 0)) == 0
    assert bits_to_int((1, 1)) == 3
    assert int_to_bits(5, 3) == (1, 0, 1)


def test_real_next_examples():
    assert real_next(PASS2, (1, 1)) == (1, 1)
    assert real_next(PASS2, (0, 0)) == (1, 0)
    for s in all_inputs(2):
        assert real_val(CONST, s) == 0
        assert real_next(CONST, s) == s


def test_flip_local_optimality_examples():
    assert is_flip_local_opt(CONST, (0, 1))
    assert is_flip_local_opt(PASS2, (1, 1))
    assert not is_flip_local_opt(PASS2, (0, 0))


def test_reverse_topological_order():
    assert reverse_topological_order(NOT1) == {1: 1}
    assert reverse_topological_order(CHAIN) == {2: 1, 1: 2}
    two = Circuit(1, ((1, "x1", "x1"), (2, "x1", "x1")), (1, 2))
    assert sorted(reverse_topological_order(two).values()) == [1, 2]


def test_malformed_netlists_are_rejected():
    with pytest.raises(InvalidInstance):
        Circuit(1, ((1, "x1", "x2"),), (1,))          # x2 does not exist
    with pytest.raises(InvalidInstance):
        Circuit(1, ((1, "x1", "g9"),), (1,))          # g9 does not exist
    with pytest.raises(InvalidInstance):
        Circuit(1, ((1, "x1", "q1"),), (1,))


def _random_circuit(draw_ints, n, gates):
    ops = [f"x{k}" for k in range(1, n + 1)]
    spec = []
    for gid in range(1, gates + 1):
        a, b = draw_ints(len(ops)), draw_ints(len(ops))
        spec.append((gid, ops[a], ops[b]))
        ops.append(f"g{gid}")
    return Circuit(n, tuple(spec), (gates,))


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 3), st.integers(1, 5), st.randoms(use_true_random=False))
def test_augmented_circuit_reports_value_and_improving_neighbour(n, gates, rnd):
    c = _random_circuit(lambda k: rnd.randrange(k), n, gates)
    aug = augment_next_val(c)
    for s in all_inputs(n):
        assert real_val(aug, s) == real_val(c, s)
        nxt = real_next(c, s)
        gate_values = eval_gates(aug, s)
        assert tuple(gate_values[g] for g in aug.next_outputs) == nxt
        neighbours = [tuple(b ^ (k == i) for k, b in enumerate(s)) for i in range(n)]
        better = [t for t in neighbours if real_val(c, t) > real_val(c, s)]
        assert (nxt == s) == (not better) == is_flip_local_opt(c, s)
        if better:
            assert nxt == better[0]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 12 - 1), st.integers(12, 16))
def test_int_bits_round_trip(value, width):
    assert bits_to_int(int_to_bits(value, width)) == value


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 3), st.integers(1, 6), st.randoms(use_true_random=False))
def test_every_circuit_has_a_flip_local_optimum(n, gates, rnd):
    c = _random_circuit(lambda k: rnd.randrange(k), n, gates)
    best = max(all_inputs(n), key=lambda s: real_val(c, s))
    assert is_flip_local_opt(c, best)
