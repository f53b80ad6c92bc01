"""Per-gadget checks for the circuit-flip compiler.

Each check builds one gadget in isolation with the same builder the
compiler uses, pins its boundary vertices (and the supervertices), and
asserts a conclusion at every local optimum of the remaining vertices.
Heavier neighbours that the gadget would see in a full instance are stood
in for by pinned "stub" vertices whose values are enumerated, so a check
passes only if the conclusion survives every value those neighbours can
take.

The search first fixes every vertex whose fixed neighbours strictly outweigh
its free ones (sound at any local optimum), then enumerates what is left
when at most ``MAX_FREE`` vertices remain.  Larger remainders stop at the
propagation, and the conclusion must then follow from the forced values
alone.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidArgument
from .search import MAX_FREE, pinned_local_optima
from .reductions.cf2nmc import control_lever_x
from .reductions.gadgets import (CHAIN_TABLE, LEVER_X, NATURAL, WEIGHT_EXP, NmcBuilder,
                                 add_comparator, add_copy, add_equality, add_nor_gate,
                                 gate_scale, input_weight, link_chain, p2)
from .reductions.leverage import leverage_weights

__all__ = ["LEMMAS", "LemmaResult", "GadgetInstance", "check_gadget_lemma", "run_gadget_lemma",
           "lemma_boundaries"]

CHAIN = dict(CHAIN_TABLE)


@dataclass
class GadgetInstance:
    graph: object
    pinned: dict
    names: dict
    builder: NmcBuilder


@dataclass
class LemmaResult:
    lemma: str
    N: int
    passed: bool
    cases: int = 0
    failures: list = field(default_factory=list)
    modes: set = field(default_factory=set)
    max_free: int = 0


def _finish(b: NmcBuilder, pins: dict, names: dict) -> GadgetInstance:
    pinned = {b.one: 1, b.zero: 0}
    pinned.update({names[k]: v for k, v in pins.items()})
    return GadgetInstance(b.graph(), pinned, names, b)


def _toward_one(inst, side, v, among=None):
    """Signed push on ``v`` toward value 1 from its neighbours in ``among``."""
    g = inst.graph
    w = g.weights
    total = 0
    for u in g.adj[v]:
        if among is not None and u not in among:
            continue
        total += w[u] if side[u] == 0 else -w[u]
    return total


def _control_bias(N):
    """Bias a chain vertex receives through its Control leverage chain."""
    eps = p2(WEIGHT_EXP["eps"] * N)
    return leverage_weights(p2(WEIGHT_EXP["control"] * N), 1, LEVER_X["control"] * N,
                            eps).target_bias


def _nor(a, b):
    return 1 - (a | b)


# ---------------------------------------------------------------- leverage

def _leverage_cases():
    for x_kind in ("short", "long"):
        for a, bv in itertools.product((0, 1), repeat=2):
            yield {"x": x_kind, "A": a, "B": bv}


def _leverage_build(N, bd):
    b = NmcBuilder(N)
    wA, wB = p2(WEIGHT_EXP["control"] * N), p2(WEIGHT_EXP["T"] * N)
    x = 1 if bd["x"] == "short" else LEVER_X["eta_to_input"] * N
    A = b.add(("Aux", "stub", "A"), wA)
    B = b.add(("Aux", "stub", "B"), wB)
    chain, ids = b.lever(A, [B], wA, x, "lever")
    names = {"A": A, "B": B, "entry": [ids[k] for k in chain.entry],
             "exit": [ids[k] for k in chain.exit]}
    inst = _finish(b, {"A": bd["A"], "B": bd["B"]}, names)
    inst.names["chain"] = chain
    return inst


def _leverage_holds(inst, side, bd):
    ch = inst.names["chain"]
    mult = p2(WEIGHT_EXP["integral"] * inst.builder.N)
    away = 1 - bd["A"]
    on_b = _toward_one(inst, side, inst.names["B"], set(inst.names["exit"]))
    on_a = _toward_one(inst, side, inst.names["A"], set(inst.names["entry"]))
    sign_b = 1 if away == 1 else -1
    sign_a = 1 if bd["A"] == 1 else -1
    return (on_b * sign_b == ch.target_bias * mult
            and on_a * sign_a == ch.source_bias * mult
            and ch.target_bias == ch.wA / 2 ** ch.x - 2 * ch.eps
            and ch.source_bias == ch.wB / 2 ** ch.x + 2 * ch.eps)


# ---------------------------------------------------------------- NOR gadget

NOR_VARIANTS = {
    # index, value-bit count, operands shared, downstream gate present
    "inner": (2, 0, False, True),
    "shared": (2, 0, True, True),
    "last": (1, 1, False, False),
}


def _nor_build(N, bd, pins):
    index, m, shared, downstream = NOR_VARIANTS[bd["variant"]]
    b = NmcBuilder(N)
    n_up, u_up = gate_scale(N, index + 1, m)
    op_w = n_up * u_up
    in1 = b.add(("Input", "X", 1), op_w)
    in2 = in1 if shared else b.add(("Input", "X", 2), op_w)
    ids = add_nor_gate(b, f"X:{index}", index, m, in1, in2)
    names = dict(ids, in1=in1, in2=in2)
    up = b.add(("NorInternal", "X:up", "z3"), CHAIN["z3"] * op_w)
    link_chain(b, up, ids["y1"], NATURAL["y"])
    names["up"] = up
    if downstream:
        n_dn, u_dn = gate_scale(N, index - 1, m)
        down = b.add(("NorInternal", "X:down", "y1"), CHAIN["y1"] * n_dn * u_dn)
        link_chain(b, ids["z3"], down, NATURAL["y"])
        names["down"] = down
    cw = _control_bias(N)
    for nm, _ in CHAIN_TABLE:
        s = b.add(("Aux", "stub", "control", nm), cw)
        b.join(s, ids[nm])
        names["ctl_" + nm] = s
    want = dict(pins)
    natural_ctl = bd.get("control", "natural") == "natural"
    for nm, _ in CHAIN_TABLE:
        nat = NATURAL[nm[0]]
        # a stub of value v pushes its neighbour toward 1 - v
        want["ctl_" + nm] = 1 - nat if natural_ctl else nat
    if "down" in names:
        want.setdefault("down", bd.get("down", NATURAL["y"]))
    want["in1"] = bd["in1"]
    if not shared:
        want["in2"] = bd["in2"]
    return _finish(b, want, names)


def _nor_inputs(bd):
    return bd["in1"], (bd["in1"] if NOR_VARIANTS[bd["variant"]][2] else bd["in2"])


def _nor_cases(extra):
    for variant, (_, _, shared, downstream) in NOR_VARIANTS.items():
        for in1, in2 in itertools.product((0, 1), repeat=2):
            if shared and in2 != in1:
                continue
            for combo in itertools.product(*[vals for _, vals in extra]):
                bd = {"variant": variant, "in1": in1, "in2": in2}
                bd.update(zip([k for k, _ in extra], combo))
                if not downstream and "down" in bd:
                    if bd["down"] != NATURAL["y"]:
                        continue
                    del bd["down"]
                yield bd


def _indiff_build(N, bd):
    return _nor_build(N, bd, {"y1": 1 - NATURAL["y"], "z1": 1 - NATURAL["z"],
                              "up": 1 - NATURAL["z"]})


def _indiff_holds(inst, side, bd):
    n = inst.names
    readers = {n["a1"], n["a2"], n["d1"], n["d2"]}
    return all(_toward_one(inst, side, n[i], readers) == 0 for i in ("in1", "in2"))


def _detect_build(N, bd):
    a, c = _nor_inputs(bd)
    return _nor_build(N, bd, {"g": 1 - _nor(a, c), "up": NATURAL["z"]})


def _detect_holds(inst, side, bd):
    return side[inst.names["z2"]] == 1 - NATURAL["z"]


def _correct_build(N, bd):
    return _nor_build(N, bd, {"up": NATURAL["z"]})


def _correct_holds(inst, side, bd):
    a, c = _nor_inputs(bd)
    n = inst.names
    if side[n["g"]] != _nor(a, c):
        return False
    return all(side[n[nm]] == NATURAL[nm[0]] for nm, _ in CHAIN_TABLE)


# ---------------------------------------------------------------- control chains

def _control_cases():
    for ctl in (0, 1):
        for targets in ("natural", "unnatural"):
            yield {"Control": ctl, "targets": targets}


def _control_build(N, bd):
    b = NmcBuilder(N)
    wc = p2(WEIGHT_EXP["control"] * N)
    control = b.add(("Control", "X"), wc)
    notcontrol = b.add(("NotControl", "X"), wc)
    b.join(control, notcontrol)
    names = {"Control": control, "NotControl": notcontrol, "ys": [], "zs": []}
    pins = {"Control": bd["Control"]}
    for i in (1, 2, 3):
        n_i, unit = gate_scale(N, i, 1)
        for nm, mult in CHAIN_TABLE:
            key = f"{nm}_{i}"
            names[key] = b.add(("NorInternal", f"X:{i}", nm), mult * n_i * unit)
            names["ys" if nm[0] == "y" else "zs"].append(names[key])
            nat = NATURAL[nm[0]]
            pins[key] = nat if bd["targets"] == "natural" else 1 - nat
    exits = {}
    for src, group in ((notcontrol, "ys"), (control, "zs")):
        targets = names[group]
        x = control_lever_x(sum(b.w(t) for t in targets), N)
        chain, ids = b.lever(src, targets, wc, x, f"control-{group}")
        exits[group] = ({ids[k] for k in chain.exit}, chain)
    names["exits"] = exits
    return _finish(b, pins, names)


def _control_holds(inst, side, bd):
    n = inst.names
    mult = p2(WEIGHT_EXP["integral"] * inst.builder.N)
    aux = p2(WEIGHT_EXP["aux"] * inst.builder.N)
    if side[n["NotControl"]] != 1 - bd["Control"]:
        return False
    for group, letter in (("ys", "y"), ("zs", "z")):
        exits, chain = n["exits"][group]
        if not chain.target_bias > 4 * aux:
            return False
        nat = NATURAL[letter]
        for v in n[group]:
            push = _toward_one(inst, side, v, exits)
            toward_natural = push if nat == 1 else -push
            expect = chain.target_bias * mult
            if toward_natural != (expect if bd["Control"] == 1 else -expect):
                return False
    return True


# ---------------------------------------------------------------- equality

def _equality_cases():
    for bits in itertools.product((0, 1), repeat=6):
        yield dict(zip(("I1", "I2", "T1", "T2", "pull_c", "pull_nc"), bits))


def _equality_build(N, bd):
    b = NmcBuilder(N)
    w_in = input_weight(N, 8)
    wt = p2(WEIGHT_EXP["T"] * N)
    wc = p2(WEIGHT_EXP["control"] * N)
    ins = [b.add(("Input", "X", j), w_in) for j in (1, 2)]
    ts = [b.add(("T", "Y", j), wt) for j in (1, 2)]
    control = b.add(("Control", "X"), wc)
    notcontrol = b.add(("NotControl", "X"), wc)
    b.join(control, notcontrol)
    names = {"I1": ins[0], "I2": ins[1], "T1": ts[0], "T2": ts[1],
             "Control": control, "NotControl": notcontrol}
    # stand-ins for the pull of the Control leverage chains
    for key, tgt in (("pull_c", control), ("pull_nc", notcontrol)):
        names[key] = b.add(("Aux", "stub", key), p2(6 * N))
        b.join(names[key], tgt)
    bits = add_equality(b, "X", ins, ts, control)
    for j, d in enumerate(bits, start=1):
        names[f"R{j}"] = d["R"]
    return _finish(b, dict(bd), names)


def _equality_holds(inst, side, bd):
    n = inst.names
    equal = (bd["I1"], bd["I2"]) == (bd["T1"], bd["T2"])
    if side[n["Control"]] != int(equal) or side[n["NotControl"]] != 1 - int(equal):
        return False
    return all(side[n[f"R{j}"]] == int(bd[f"I{j}"] != bd[f"T{j}"]) for j in (1, 2))


# ---------------------------------------------------------------- copy

def _copy_cases():
    for side in ("A", "B"):
        for bits in itertools.product((0, 1), repeat=4):
            yield dict(zip(("Next", "target", "e3", "e4"), bits), side=side)


def _copy_build(N, bd, active):
    b = NmcBuilder(N)
    m = 1
    flag = b.add(("Flag",), p2(WEIGHT_EXP["flag"] * N))
    n_next, u_next = gate_scale(N, m + 1, m)
    nx = b.add(("NextOut", bd["side"], 1), n_next * u_next)
    tgt = b.add(("Input", "other", 1), input_weight(N, 6))
    parts = add_copy(b, bd["side"], flag, [nx], [tgt])[0]
    names = {"Flag": flag, "Next": nx, "target": tgt, **parts}
    # T's neighbours in the equality gadget of the other circuit
    for key, exp in (("e3", "eq_hi"), ("e4", "eq_lo")):
        names[key] = b.add(("Aux", "stub", key), p2(WEIGHT_EXP[exp] * N))
        b.join(names[key], parts["T"])
    source_flag = 0 if bd["side"] == "A" else 1
    pins = {k: bd[k] for k in ("Next", "target", "e3", "e4")}
    pins["Flag"] = source_flag if active else 1 - source_flag
    return _finish(b, pins, names)


def _copy2_holds(inst, side, bd):
    n = inst.names
    return side[n["T"]] == bd["Next"] and side[n["eta"]] == 1 - bd["Next"]


def _copy_unbias_holds(inst, side, bd):
    return _toward_one(inst, side, inst.names["Next"]) == 0


# ---------------------------------------------------------------- comparator

COMPARATOR_M = 2


def _comparator_build(N, pins_by_name, flag_pinned):
    b = NmcBuilder(N)
    m = COMPARATOR_M
    flag = b.add(("Flag",), p2(WEIGHT_EXP["flag"] * N))
    names = {"Flag": flag}
    va, vb, ya, zb = [], [], [], []
    for k in range(1, m + 1):
        n_k, u_k = gate_scale(N, k, m)
        names[f"va{k}"] = b.add(("ValOut", "A", k), n_k * u_k)
        names[f"vb{k}"] = b.add(("ValOut", "B", k), n_k * u_k)
        va.append(names[f"va{k}"])
        vb.append(names[f"vb{k}"])
    for k in range(1, m + 2):
        n_k, u_k = gate_scale(N, k, m)
        names[f"ya{k}"] = b.add(("NorInternal", f"A:{k}", "y3"), CHAIN["y3"] * n_k * u_k)
        names[f"zb{k}"] = b.add(("NorInternal", f"B:{k}", "z3"), CHAIN["z3"] * n_k * u_k)
        ya.append(names[f"ya{k}"])
        zb.append(names[f"zb{k}"])
    add_comparator(b, flag, va, vb, ya, zb)
    # the pull of Flag's leverage chains into the copy gadgets
    eps = p2(WEIGHT_EXP["eps"] * N)
    lever = leverage_weights(p2(WEIGHT_EXP["flag"] * N), p2(WEIGHT_EXP["F"] * N),
                             LEVER_X["flag_to_F"] * N, eps)
    names["pull"] = b.add(("Aux", "stub", "pull"), 2 * 2 * lever.source_bias)
    b.join(names["pull"], flag)
    pins = dict(pins_by_name)
    if flag_pinned is not None:
        pins["Flag"] = flag_pinned
    inst = _finish(b, pins, names)
    inst.names["sideA"] = va + ya
    inst.names["sideB"] = vb + zb
    return inst


def _cmp_unbias_cases():
    m = COMPARATOR_M
    keys = [f"va{k}" for k in range(1, m + 1)] + [f"vb{k}" for k in range(1, m + 1)]
    keys += [f"ya{k}" for k in range(1, m + 2)] + [f"zb{k}" for k in range(1, m + 2)]
    for flag in (0, 1):
        for bits in itertools.product((0, 1), repeat=len(keys)):
            yield dict(zip(keys, bits), Flag=flag)


def _cmp_unbias_build(N, bd):
    pins = {k: v for k, v in bd.items() if k != "Flag"}
    pins["pull"] = 0
    return _comparator_build(N, pins, bd["Flag"])


def _cmp_unbias_holds(inst, side, bd):
    quiet = inst.names["sideA"] if bd["Flag"] == 1 else inst.names["sideB"]
    return all(_toward_one(inst, side, v) == 0 for v in quiet)


def _value_bits(value, m):
    return [(value >> (k - 1)) & 1 for k in range(1, m + 1)]


def _cmp_correct_cases():
    m = COMPARATOR_M
    for wrong in ("A", "B"):
        for va, vb in itertools.product(range(2 ** m), repeat=2):
            for low in itertools.product((0, 1), repeat=m):
                for pull in (0, 1):
                    yield {"wrong": wrong, "valA": va, "valB": vb, "low": low, "pull": pull}


def _cmp_pins(bd, natural_a, natural_b):
    m = COMPARATOR_M
    pins = {"pull": bd["pull"]}
    for k, bit in enumerate(_value_bits(bd["valA"], m), start=1):
        pins[f"va{k}"] = bit
    for k, bit in enumerate(_value_bits(bd["valB"], m), start=1):
        pins[f"vb{k}"] = 1 - bit              # circuit B reports complemented value bits
    for k in range(1, m + 2):
        pins[f"ya{k}"] = NATURAL["y"] if natural_a[k - 1] else 1 - NATURAL["y"]
        pins[f"zb{k}"] = NATURAL["z"] if natural_b[k - 1] else 1 - NATURAL["z"]
    return pins


def _cmp_correct_build(N, bd):
    m = COMPARATOR_M
    # the wrong circuit's detector has fired at its first non-value gate;
    # its value-gate control vertices may hold anything
    bad = list(bool(x) for x in bd["low"]) + [False]
    good = [True] * (m + 1)
    nat_a, nat_b = (bad, good) if bd["wrong"] == "A" else (good, bad)
    return _comparator_build(N, _cmp_pins(bd, nat_a, nat_b), None)


def _cmp_correct_holds(inst, side, bd):
    # the circuit whose check failed never becomes the source
    return side[inst.names["Flag"]] == (1 if bd["wrong"] == "A" else 0)


def _super_cases():
    m = COMPARATOR_M
    for va, vb in itertools.product(range(2 ** m), repeat=2):
        for pull in (0, 1):
            yield {"valA": va, "valB": vb, "pull": pull}


def _super_build(N, bd):
    nat = [True] * (COMPARATOR_M + 1)
    return _comparator_build(N, _cmp_pins(bd, nat, nat), None)


def _super_holds(inst, side, bd):
    flag = side[inst.names["Flag"]]
    if bd["valB"] > bd["valA"]:
        return flag == 1
    if bd["valA"] > bd["valB"]:
        return flag == 0
    return True


# ---------------------------------------------------------------- registry

@dataclass(frozen=True)
class Lemma:
    description: str
    cases: object
    build: object
    holds: object


LEMMAS = {
    "leverage": Lemma(
        "a leverage chain pushes its output away from the input by wA/2^x - 2 eps "
        "and its input toward itself by wB/2^x + 2 eps",
        _leverage_cases, _leverage_build, _leverage_holds),
    "SY_indifferency": Lemma(
        "with y1 and z1 unnatural the NOR readers cancel on both inputs",
        lambda: _nor_cases([("control", ("natural", "unnatural")), ("down", (0, 1))]),
        _indiff_build, _indiff_holds),
    "SY_detection": Lemma(
        "an incorrect NOR output drives z2 unnatural",
        lambda: _nor_cases([("control", ("natural", "unnatural")), ("down", (0, 1))]),
        _detect_build, _detect_holds),
    "SY_correction": Lemma(
        "in natural mode the NOR output is correct and the chain stays natural",
        lambda: _nor_cases([("control", ("natural",))]),
        _correct_build, _correct_holds),
    "control_bias": Lemma(
        "Control's leverage chains bias every chain vertex toward its natural value "
        "exactly when Control is 1",
        _control_cases, _control_build, _control_holds),
    "consistent1": Lemma(
        "Control equals the predicate inputs == targets",
        _equality_cases, _equality_build, _equality_holds),
    "copy2": Lemma(
        "an active copy gadget sets T to Next",
        _copy_cases, lambda N, bd: _copy_build(N, bd, True), _copy2_holds),
    "copy_unbias": Lemma(
        "an inactive copy gadget puts zero bias on Next",
        _copy_cases, lambda N, bd: _copy_build(N, bd, False), _copy_unbias_holds),
    "comparator_unbias": Lemma(
        "the comparator puts zero bias on the circuit Flag points away from",
        _cmp_unbias_cases, _cmp_unbias_build, _cmp_unbias_holds),
    "comparator_correctness": Lemma(
        "a circuit whose first non-value gate check has failed never wins Flag",
        _cmp_correct_cases, _cmp_correct_build, _cmp_correct_holds),
    "super_comparison": Lemma(
        "with both circuits natural Flag points at the strictly larger value",
        _super_cases, _super_build, _super_holds),
}


def lemma_boundaries(lemma_id):
    if lemma_id not in LEMMAS:
        raise InvalidArgument(f"unknown lemma {lemma_id!r}; expected one of {sorted(LEMMAS)}")
    return list(LEMMAS[lemma_id].cases())


def run_gadget_lemma(lemma_id, boundary=None, N=1, mode="auto") -> LemmaResult:
    """Check one lemma on every boundary assignment (or just ``boundary``)."""
    if not isinstance(N, int) or N < 1:
        raise InvalidArgument(f"scale must be a positive integer, got {N!r}")
    cases = lemma_boundaries(lemma_id) if boundary is None else [dict(boundary)]
    lemma = LEMMAS[lemma_id]
    res = LemmaResult(lemma_id, N, True)
    for bd in cases:
        inst = lemma.build(N, bd)
        found = pinned_local_optima(inst.graph, inst.pinned, mode=mode, max_free=MAX_FREE)
        res.cases += 1
        res.modes.add(found.mode)
        res.max_free = max(res.max_free, found.free)
        ok = bool(found.assignments)
        for side in found.assignments:
            try:
                if not lemma.holds(inst, side, bd):
                    ok = False
            except KeyError:
                ok = False          # the conclusion needs a value propagation left open
            if not ok:
                break
        if not ok:
            res.passed = False
            res.failures.append(bd)
    return res


def check_gadget_lemma(lemma_id, boundary=None, N=1, mode="auto") -> bool:
    """True iff every local optimum of the pinned gadget satisfies the lemma."""
    return run_gadget_lemma(lemma_id, boundary, N, mode).passed
