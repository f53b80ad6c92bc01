"""Circuit-Flip to Node-Max-Cut: the flip-flop construction.

Two copies of the augmented circuit (``A`` and ``B``, with ``B``'s value
outputs complemented) are built from NOR gadgets and driven by control
chains.  Equality gadgets decide whether each circuit is in compute or write
mode, Copy gadgets move the improving neighbour of the source circuit into
the other circuit's inputs, and a comparator sets ``Flag`` to the circuit
with the larger value.  At every local optimum the inputs of the circuit
that Flag points at form a flip-local optimum of the source circuit.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from ..circuit import Circuit, augment_next_val, eval_gates, reverse_topological_order
from ..errors import InvalidArgument, InvalidInstance, ScaleTooSmall
from ..games_core import flip_dynamics, make_cut
from .common import SolutionMap
from .gadgets import (CHAIN_TABLE, GATE_STEP, LEVER_X, NATURAL, NOR_CONST, NOR_CONST_COUNT,
                      NOR_TABLE, NOR_VERTEX_COUNT, WEIGHT_EXP, NmcBuilder, add_comparator,
                      add_copy, add_equality, add_nor_gate, gate_scale, input_weight,
                      link_chain, p2)
from .leverage import leverage_weights

__all__ = ["reduce_cf_to_nmc", "map_back_cf", "prepare_circuits", "n_min",
           "dominance_inequalities", "gadget_inequalities", "control_lever_x", "intended_configuration",
           "expected_vertex_count", "N_SEARCH_LIMIT"]

N_SEARCH_LIMIT = 400
SIDES = ("A", "B")


def _complement_values(c: Circuit) -> Circuit:
    """Same circuit with every value output passed through one more NOR."""
    top = max(g for g, _, _ in c.gates)
    extra, outs = [], []
    for k, o in enumerate(c.outputs, start=1):
        extra.append((top + k, f"g{o}", f"g{o}"))
        outs.append(top + k)
    return Circuit(c.n, tuple(c.gates) + tuple(extra), tuple(outs), c.next_outputs)


def prepare_circuits(c: Circuit):
    """``{"A": augmented, "B": augmented with complemented value bits}``."""
    a = augment_next_val(c)
    return {"A": a, "B": _complement_values(a)}


def _chain_weights(circ: Circuit, N, letter):
    m = circ.m
    total = Fraction(0)
    for i in range(1, len(circ.gates) + 1):
        n, unit = gate_scale(N, i, m)
        total += sum(mult * n * unit for name, mult in CHAIN_TABLE if name[0] == letter)
    return total


def control_lever_x(total_target_weight, N):
    """Leverage length for a Control fan-out.

    The base length gives each target about ``2**(-87N)``; it grows with the
    total target weight so the pull back on Control stays below ``2**(6N)``.
    """
    base = LEVER_X["control"] * N
    need = (total_target_weight / p2(6 * N)).__ceil__()
    return max(base, (need - 1).bit_length() + 1)


def gadget_inequalities():
    """Scale-free comparisons inside one NOR gadget and between neighbouring gates.

    Weights are in units of the gate weight; the previous gate (which feeds
    ``y1``) and every operand are one gate step heavier.
    """
    t, k = NOR_TABLE, NOR_CONST
    ch = dict(CHAIN_TABLE)
    step = 2 ** GATE_STEP
    noise_on_h = t["g"] + t["c1"] + t["c2"]
    return [
        ("h default beats g and both detectors", k["h_default"], noise_on_h),
        ("two readers beat h's default, g and both detectors",
         t["a1"] + t["a2"] - k["h_default"], noise_on_h),
        ("h corrects g against both detectors", t["h"], t["c1"] + t["c2"]),
        ("c1 outweighs the backward pull on z2", t["c1"], ch["y3"]),
        ("c2 outweighs the backward pull on y2", t["c2"], ch["z2"]),
        ("c1 default beats z2", k["c1_default"], ch["z2"]),
        ("one input of c1 beats its default and z2",
         2 * min(t["g"], t["h"]), k["c1_default"] + ch["z2"]),
        ("c2 default beats y2", k["c2_default"], ch["y2"]),
        ("one input of c2 beats its default and y2",
         2 * min(t["g"], t["h"]), k["c2_default"] + ch["y2"]),
        ("y1 pins h in unnatural mode", 2 * ch["y1"], noise_on_h),
        ("y1 outweighs a reader", ch["y1"], t["a1"]),
        ("z1 outweighs a reader", ch["z1"], t["d1"]),
        ("an operand pins its reader over h", step * t["g"], t["h"]),
        ("unnatural y1 moves z1 past y2", ch["y1"], ch["y2"]),
        ("unnatural z1 moves y2 past z2", ch["z1"], ch["z2"]),
        ("unnatural y2 moves z2 past y3", ch["y2"], ch["y3"]),
        ("unnatural z2 moves y3 past z3", ch["z2"], ch["z3"]),
        ("unnatural y3 moves z3 past the next y1", ch["y3"], ch["y1"] / step),
        ("unnatural z3 moves the next y1 past its z1 and h",
         step * ch["z3"], ch["z1"] + t["h"]),
    ]


def dominance_inequalities(circuits, N):
    """Static weight comparisons ``(name, lhs, rhs)``; each must have ``lhs > rhs``."""
    eps = p2(WEIGHT_EXP["eps"] * N)
    W = {k: p2(v * N) for k, v in WEIGHT_EXP.items()}
    n_bits = circuits["A"].n
    m = circuits["A"].m
    top = max(len(c.gates) for c in circuits.values())
    w_input = input_weight(N, top)
    out = list(gadget_inequalities())
    for side, circ in circuits.items():
        for letter, ctl in (("z", "Control"), ("y", "NotControl")):
            tw = _chain_weights(circ, N, letter)
            ch = leverage_weights(W["control"], tw, control_lever_x(tw, N), eps)
            back = ch.source_bias
            if ctl == "Control":
                out.append((f"Control{side} follows its equality results",
                            W["R"] / 2, W["control"] + back))
            else:
                out.append((f"NotControl{side} follows Control{side}", W["control"], back))
            out.append((f"{ctl}{side} bias beats the gadget auxiliaries",
                        ch.target_bias, 4 * W["aux"]))
    n_first, u_first = gate_scale(N, m + 1, m)
    y3 = dict(CHAIN_TABLE)["y3"]
    value_total = sum(2 * gate_scale(N, k, m)[0] * gate_scale(N, k, m)[1]
                      for k in range(1, m + 1))
    out.append(("comparator control vertices outweigh all value bits",
                2 * y3 * n_first * u_first, value_total))
    flag_lever = leverage_weights(W["flag"], W["F"], LEVER_X["flag_to_F"] * N, eps)
    flag_back = 2 * n_bits * flag_lever.source_bias
    n1, u1 = gate_scale(N, 1, m)
    out.append(("least value bit outweighs Flag's leverage load", 2 * n1 * u1, flag_back))
    out.append(("gadget margins absorb Flag's pairs", n1 * u1 / 32, 2 * W["flag"]))
    input_lever = leverage_weights(W["eta"], w_input, LEVER_X["eta_to_input"] * N, eps)
    next_lo = gate_scale(N, m + 1, m)
    next_hi = gate_scale(N, m + n_bits, m)
    out.append(("Next pins eta over T and the input lever",
                2 * next_lo[0] * next_lo[1], W["T"] + input_lever.source_bias))
    out.append(("F pins eta over Next, T and the input lever",
                2 * W["F"], next_hi[0] * next_hi[1] + W["T"] + input_lever.source_bias))
    out.append(("Flag's lever pins F", flag_lever.target_bias, W["eta"]))
    out.append(("eta's pairs stay below the Next gadget margins",
                next_lo[0] * next_lo[1] / 32, 2 * W["eta"]))
    out.append(("eta pins T over the equality gadget", W["eta"], W["eq_hi"] + W["eq_lo"]))
    out.append(("the copy lever beats the equality pull on an input",
                input_lever.target_bias, W["eq_hi"]))
    out.append(("inputs pin e1", w_input, W["eq_hi"] + W["eq_lo"]))
    out.append(("e4, e5 results beat R's constant and Control", W["eq_lo"], W["R"]))
    const_load = 8 * (sum(len(c.gates) for c in circuits.values()) + 4 * n_bits) * \
        max(W["F"], 4 * w_input)
    out.append(("supervertices outweigh every constant they hold", W["super"], const_load))
    return out


def n_min(c: Circuit):
    """Smallest ``N`` for which every dominance inequality holds (memoized per circuit)."""
    return _n_min(c)


@lru_cache(maxsize=64)
def _n_min(c: Circuit):
    circuits = prepare_circuits(c)
    for N in range(1, N_SEARCH_LIMIT + 1):
        try:
            rows = dominance_inequalities(circuits, N)
        except InvalidArgument:
            continue                # a leverage chain has no room at this scale
        if all(lhs > rhs for _, lhs, rhs in rows):
            return N
    raise ScaleTooSmall(f"no scale up to {N_SEARCH_LIMIT} satisfies the dominance inequalities")


def _build_circuit(b: NmcBuilder, side, circ: Circuit, inputs):
    index = reverse_topological_order(circ)
    m = circ.m
    by_index = {i: g for g, i in index.items()}
    gm = circ.gate_map()
    M = len(gm)
    gates = {}
    out = {}

    def operand(op):
        if op[0] == "x":
            return inputs[int(op[1:]) - 1]
        return out[int(op[1:])]

    for i in range(M, 0, -1):
        gid = by_index[i]
        if i <= m:
            role = ("ValOut", side, i)
        elif i <= m + circ.n:
            role = ("NextOut", side, i - m)
        else:
            role = None
        a, bb = gm[gid]
        ids = add_nor_gate(b, f"{side}:{i}", i, m, operand(a), operand(bb), role)
        gates[i] = ids
        out[gid] = ids["g"]
    for i in range(M, 1, -1):
        link_chain(b, gates[i]["z3"], gates[i - 1]["y1"], NATURAL["y"])
    return gates, index


def reduce_cf_to_nmc(c: Circuit, N: int):
    """Compile circuit ``c`` at scale ``N``; returns ``(graph, solution map)``."""
    if not isinstance(N, int) or N < 1:
        raise ScaleTooSmall(f"scale must be a positive integer, got {N!r}")
    circuits = prepare_circuits(c)
    need = n_min(c)
    if N < need:
        raise ScaleTooSmall(f"scale {N} is below the minimum {need} for this circuit")
    n = c.n
    b = NmcBuilder(N)
    W = {k: p2(v * N) for k, v in WEIGHT_EXP.items()}
    flag = b.add(("Flag",), W["flag"])
    w_input = input_weight(N, max(len(circ.gates) for circ in circuits.values()))
    inputs = {s: [b.add(("Input", s, j), w_input) for j in range(1, n + 1)] for s in SIDES}
    gates, index, control, notcontrol = {}, {}, {}, {}
    for s in SIDES:
        gates[s], index[s] = _build_circuit(b, s, circuits[s], inputs[s])
        control[s] = b.add(("Control", s), W["control"])
        notcontrol[s] = b.add(("NotControl", s), W["control"])
        b.join(control[s], notcontrol[s])
    for s in SIDES:
        ys = [ids[nm] for ids in gates[s].values() for nm, _ in CHAIN_TABLE if nm[0] == "y"]
        zs = [ids[nm] for ids in gates[s].values() for nm, _ in CHAIN_TABLE if nm[0] == "z"]
        for src, targets, tag in ((notcontrol[s], ys, "y"), (control[s], zs, "z")):
            x = control_lever_x(sum(b.w(t) for t in targets), N)
            b.lever(src, targets, W["control"], x, f"control-{tag}:{s}")
    m = circuits["A"].m
    nexts = {s: [gates[s][m + j]["g"] for j in range(1, n + 1)] for s in SIDES}
    copies = {}
    for s, other in (("A", "B"), ("B", "A")):
        copies[s] = add_copy(b, s, flag, nexts[s], inputs[other])
    for s, other in (("A", "B"), ("B", "A")):
        ts = [cp["T"] for cp in copies[other]]
        add_equality(b, s, inputs[s], ts, control[s])
    add_comparator(
        b, flag,
        value_a=[gates["A"][k]["g"] for k in range(1, m + 1)],
        value_b_bar=[gates["B"][k]["g"] for k in range(1, m + 1)],
        ctl_a=[gates["A"][k]["y3"] for k in range(1, m + 2)],
        ctl_b=[gates["B"][k]["z3"] for k in range(1, m + 2)],
    )
    g = b.graph()
    sm = SolutionMap("cf2nmc", {
        "N": N,
        "n": n,
        "m": m,
        "n_min": need,
        "flag": flag,
        "super_one": b.one,
        "super_zero": b.zero,
        "inputs": {s: inputs[s] for s in SIDES},
        "control": control,
        "notcontrol": notcontrol,
        "gates": {s: {str(i): ids for i, ids in gates[s].items()} for s in SIDES},
        "gate_index": {s: {str(gid): i for gid, i in index[s].items()} for s in SIDES},
        "roles": [list(r) for r in b.roles],
    })
    return g, sm


def map_back_cf(sm: SolutionMap, cut):
    """Bits of ``I_B`` if Flag is 1, else of ``I_A``; values read relative to SuperOne."""
    cut = make_cut(cut)
    d = sm.data
    one = cut[d["super_one"]]

    def value(v):
        return 1 if cut[v] == one else 0

    side = "B" if value(d["flag"]) == 1 else "A"
    return tuple(value(v) for v in d["inputs"][side])


def expected_vertex_count(c: Circuit, N: int):
    """Vertex count predicted from the gadget inventory alone."""
    circuits = prepare_circuits(c)
    n = c.n
    total = 2 + 1 + 2 * n + 4                                        # supers, Flag, inputs, controls
    for s in SIDES:
        circ = circuits[s]
        M = len(circ.gates)
        total += M * (NOR_VERTEX_COUNT + NOR_CONST_COUNT) + 2 * (M - 1)
        for letter in "yz":
            tw = _chain_weights(circ, N, letter)
            total += 4 * (control_lever_x(tw, N) + 1)
    total += 2 * n * (3 + 1 + 1)                                     # F, eta, T + 2 consts
    total += 2 * n * 4 * (LEVER_X["flag_to_F"] * N + 1 + LEVER_X["eta_to_input"] * N + 1)
    total += 2 * (n * (6 + 3) + 1)                                   # equality
    m = circuits["A"].m
    total += 2 * m + 2 * 2 * (m + 1)                                 # comparator consts
    return total


def intended_configuration(c: Circuit, g, sm: SolutionMap, s, cap=10 ** 7):
    """Cut in which both circuits hold input ``s`` and every gate is correct.

    Supervertices, inputs and gate outputs are pinned; control chains start
    natural, Control vertices at 1, constants at their value and everything
    else at 0, and the free vertices are settled by improving flips with the
    pins held.  The result is returned whether or not it is a local optimum
    of the full instance; callers check that separately.
    """
    d = sm.data
    roles = d["roles"]
    s = tuple(int(x) for x in s)
    circuits = prepare_circuits(c)
    vals = {d["super_one"]: 1, d["super_zero"]: 0}
    for side in SIDES:
        for v, bit in zip(d["inputs"][side], s):
            vals[v] = bit
    start = {}
    for side in SIDES:
        out = eval_gates(circuits[side], s)
        for gid, i in d["gate_index"][side].items():
            ids = d["gates"][side][str(i)]
            vals[ids["g"]] = out[int(gid)]
            for nm, _ in CHAIN_TABLE:
                start[ids[nm]] = NATURAL[nm[0]]
        start[d["control"][side]] = 1
    pinned = set(vals)
    start.update(vals)
    cut = []
    for v, role in enumerate(roles):
        if v in start:
            cut.append(start[v])
        elif role[0] == "Aux" and role[1] == "const":
            cut.append(role[2])
        else:
            cut.append(0)
    settled, _, _ = flip_dynamics(g, tuple(cut), schedule="fifo", frozen=pinned, cap=cap)
    return settled
