"""Node-Max-Cut gadgets used by the circuit-flip compiler.

Weights are kept as exact ``Fraction`` values in "scale units", where the
scale parameter ``N`` enters only through powers ``2**(k*N)``.  The builder
multiplies everything by ``2**(500*N)`` at the end so the emitted graph has
integer weights (the lightest vertices become weight 1).

Conventions shared by every gadget:

* a vertex holds value 1 iff it sits on the same side as ``SuperOne``;
* a constant of value ``c`` is a fresh vertex joined to the supervertex of
  value ``1 - c``, so it always takes value ``c`` and pushes its other
  neighbour toward ``1 - c``;
* a "pair" is an edge ``u - x`` plus a constant at ``x`` of weight ``w_u``.
  Depending on the constant's value the pair either cancels or pushes ``x``
  with ``2 w_u``, which is how one vertex influences another only in one of
  its two states.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import InvalidInstance
from ..games_core import VertexWeightedGraph
from .leverage import leverage_weights

__all__ = [
    "p2", "WEIGHT_EXP", "LEVER_X", "GATE_STEP", "NOR_TABLE", "NOR_CONST", "CHAIN_TABLE",
    "NATURAL", "NmcBuilder", "add_nor_gate", "link_chain", "add_equality", "add_copy",
    "add_comparator", "gate_scale", "input_weight", "NOR_VERTEX_COUNT", "NOR_CONST_COUNT",
]


def p2(e):
    return Fraction(2) ** e


# exponent of N for each fixed-weight vertex class (weight = 2**(k*N))
WEIGHT_EXP = {
    "super": 1000,
    "F": 110,
    "eta": 40,
    "flag": 80,
    "T": 20,
    "eq_hi": 20,        # e1, e2, e3
    "eq_lo": 15,        # e4, e5 and the constants around them
    "R": 9,
    "control": 7,
    "aux": -200,
    "eps": -500,
    "gate": 100,
    "value_gate": 90,
    "integral": 500,
}

# leverage length in multiples of N for fixed connection sites
LEVER_X = {"flag_to_F": 30, "eta_to_input": 19, "control": 94}

# consecutive gates differ by this factor (as a power of two)
GATE_STEP = 4

# NOR gadget internals as multiples of the gate weight n_i * unit
NOR_TABLE = {
    "g": Fraction(1),
    "h": Fraction(1),
    "a1": Fraction(2), "a2": Fraction(2),
    "d1": Fraction(2), "d2": Fraction(2),
    "c1": Fraction(15, 32), "c2": Fraction(15, 32),
}
# constants inside the gadget, same units
NOR_CONST = {
    "h_default": Fraction(63, 32),
    "c1_default": Fraction(9, 16),
    "c2_default": Fraction(9, 16),
}
# control chain of one gate, in chain order
CHAIN_TABLE = (
    ("y1", Fraction(17, 8)), ("z1", Fraction(33, 16)),
    ("y2", Fraction(1, 2)), ("z2", Fraction(13, 32)),
    ("y3", Fraction(11, 32)), ("z3", Fraction(11, 32)),
)
NATURAL = {"y": 1, "z": 0}


# vertices and constants added by one ``add_nor_gate`` call
NOR_VERTEX_COUNT = len(NOR_TABLE) + len(CHAIN_TABLE) + 4
NOR_CONST_COUNT = 27


def gate_scale(N, index, m):
    """``(n_i, unit)`` for the gate numbered ``index``; value bits use the lighter unit."""
    unit = p2(WEIGHT_EXP["value_gate"] * N) if index <= m else p2(WEIGHT_EXP["gate"] * N)
    return 2 ** (N + GATE_STEP * index), unit


def input_weight(N, top_index):
    """Circuit inputs weigh one gate step above the top gate."""
    n, unit = gate_scale(N, top_index + 1, 0)
    return n * unit


class NmcBuilder:
    """Accumulates vertices (with roles), edges and constants."""

    def __init__(self, N, supervertices=True):
        self.N = N
        self.weights = []
        self.roles = []
        self.edges = []
        self.eps = p2(WEIGHT_EXP["eps"] * N)
        self.one = self.zero = None
        if supervertices:
            big = p2(WEIGHT_EXP["super"] * N)
            self.one = self.add(("SuperOne",), big)
            self.zero = self.add(("SuperZero",), big)
            self.join(self.one, self.zero)

    def add(self, role, weight):
        self.weights.append(Fraction(weight))
        self.roles.append(tuple(role))
        return len(self.weights) - 1

    def join(self, u, v):
        if u == v:
            raise InvalidInstance("self-loop in gadget wiring")
        self.edges.append((u, v))

    def w(self, v):
        return self.weights[v]

    def const(self, at, value, weight):
        k = self.add(("Aux", "const", value), weight)
        self.join(k, at)
        self.join(k, self.zero if value else self.one)
        return k

    def pair(self, u, x, value):
        """Edge ``u - x`` plus a constant of value ``value`` and weight ``w_u`` at ``x``.

        ``x`` is pushed toward ``1 - value`` with ``2 w_u`` when ``u == value``
        and feels nothing from the pair otherwise.
        """
        self.join(u, x)
        return self.const(x, value, self.w(u))

    def lever(self, source, targets, wA, x, name):
        """Leverage chain from ``source`` to every vertex in ``targets``."""
        wB = sum(self.w(t) for t in targets)
        chain = leverage_weights(wA, wB, x, self.eps)
        ids = {}
        for k, j in chain.vertices():
            ids[(k, j)] = self.add(("LeverageInternal", name, k, f"s{j}"), chain.weight(k, j))
        for kj in chain.entry:
            self.join(source, ids[kj])
        for a, b in chain.internal_edges():
            self.join(ids[a], ids[b])
        for kj in chain.exit:
            for t in targets:
                self.join(ids[kj], t)
        return chain, ids

    def integral_weights(self):
        mult = p2(WEIGHT_EXP["integral"] * self.N)
        out = []
        for v, w in enumerate(self.weights):
            s = w * mult
            if s.denominator != 1 or s <= 0:
                raise InvalidInstance(f"vertex {v} {self.roles[v]} has non-integral weight {s}")
            out.append(s.numerator)
        return out

    def graph(self):
        return VertexWeightedGraph(tuple(self.integral_weights()), tuple(self.edges))


def add_nor_gate(b: NmcBuilder, gate, index, m, in1, in2, out_role=None):
    """One NOR gadget reading vertices ``in1``/``in2``; returns its vertex ids by name.

    ``gate`` labels the roles, ``index`` is the gate's position in reverse
    topological order (so ``n_i = 2**(N + 4*index)``), ``m`` the number of
    value bits (those gates use the lighter unit).

    Layout: readers ``a_k``/``d_k`` copy ``not in_k`` in natural mode and sit
    at ``a = 0``, ``d = 1`` in unnatural mode, where their pulls on the input
    cancel.  ``h`` is the AND of the ``a_k`` (so ``h = not g`` when correct)
    and is pinned to 1 by ``y1`` in unnatural mode.  ``c1`` detects
    ``g = h = 1`` and pushes ``z2`` unnatural, ``c2`` detects ``g = h = 0``
    and pushes ``y2`` unnatural.
    """
    N = b.N
    n, unit = gate_scale(N, index, m)
    scale = n * unit
    ids = {}
    for name, mult in NOR_TABLE.items():
        role = out_role if (name == "g" and out_role) else ("NorInternal", gate, name)
        ids[name] = b.add(role, mult * scale)
    for name, mult in CHAIN_TABLE:
        ids[name] = b.add(("NorInternal", gate, name), mult * scale)
    g, h, c1, c2 = ids["g"], ids["h"], ids["c1"], ids["c2"]
    aux_w = p2(WEIGHT_EXP["aux"] * N)
    for k, src in (("1", in1), ("2", in2)):
        a, d = ids["a" + k], ids["d" + k]
        b.pair(src, a, 1)
        b.pair(src, d, 0)
        b.join(a, h)
        b.const(a, 0, b.w(h))
        for ctl, x in (("y1", a), ("z1", d)):
            t = b.add(("Aux", "bias", gate, ("a" if x == a else "d") + k), aux_w)
            b.join(t, ids[ctl])
            b.join(t, x)
    b.const(h, 0, NOR_CONST["h_default"] * scale)
    b.pair(ids["y1"], h, 0)
    b.const(ids["y1"], 0, b.w(h))
    b.join(h, g)
    b.pair(g, c1, 0)
    b.pair(h, c1, 0)
    b.const(c1, 1, NOR_CONST["c1_default"] * scale)
    b.pair(c1, ids["z2"], 0)
    b.pair(g, c2, 1)
    b.pair(h, c2, 1)
    b.const(c2, 0, NOR_CONST["c2_default"] * scale)
    b.pair(c2, ids["y2"], 1)
    names = [nm for nm, _ in CHAIN_TABLE]
    for u, v in zip(names, names[1:]):
        link_chain(b, ids[u], ids[v], NATURAL[v[0]])
    return ids


def link_chain(b: NmcBuilder, u, v, v_natural):
    """Control-chain link ``u -> v`` (natural values differ).

    ``u`` unnatural pushes ``v`` unnatural, ``v`` natural pushes ``u`` natural,
    and nothing else crosses the link.
    """
    b.pair(u, v, v_natural)
    b.const(u, v_natural, b.w(v))


def add_equality(b: NmcBuilder, label, inputs, targets, control):
    """Per-bit comparison of ``inputs`` with ``targets`` feeding ``control``.

    Each bit gets ``e1..e5`` and a result vertex ``R`` that is 0 exactly when
    the two bits agree; ``control`` carries a constant 1 just light enough
    that a single disagreeing bit turns it to 0.
    """
    N = b.N
    hi, lo = p2(WEIGHT_EXP["eq_hi"] * N), p2(WEIGHT_EXP["eq_lo"] * N)
    rw = p2(WEIGHT_EXP["R"] * N)
    out = []
    for j, (i_v, t_v) in enumerate(zip(inputs, targets), start=1):
        e = {k: b.add(("EqualityInternal", label, j, f"e{k}"), hi if k <= 3 else lo)
             for k in range(1, 6)}
        r = b.add(("EqualityInternal", label, j, "R"), rw)
        b.join(i_v, e[1])
        b.join(e[1], e[2])
        b.join(t_v, e[3])
        b.join(e[1], e[4])
        b.join(t_v, e[4])
        b.join(e[2], e[5])
        b.join(e[3], e[5])
        for k in (4, 5):
            b.const(e[k], 0, lo)
            b.join(e[k], r)
        b.const(r, 0, lo)
        b.join(r, control)
        out.append(dict(e, R=r))
    # half a result weight below the all-agree total so one mismatch decides
    b.const(control, 1, (len(out) - Fraction(1, 2)) * rw)
    return out


def add_copy(b: NmcBuilder, side, flag, nexts, targets):
    """Copy gadget of circuit ``side``: active when Flag points at it as source.

    Circuit ``A`` is the source when Flag is 0, ``B`` when Flag is 1.  While
    active, ``eta_j = not Next_j`` so ``T_j = Next_j`` and the input bit
    ``targets[j]`` of the other circuit is nudged toward ``Next_j``.  While
    inactive, ``eta_j`` is pinned and its pull on ``Next_j`` is cancelled.
    """
    N = b.N
    # constant value that cancels F (or eta) exactly when the copy is active
    cv = 0 if side == "A" else 1
    fw, ew, tw = (p2(WEIGHT_EXP[k] * N) for k in ("F", "eta", "T"))
    out = []
    for j, (nx, tgt) in enumerate(zip(nexts, targets), start=1):
        f = b.add(("CopyInternal", side, j, "F"), fw)
        eta = b.add(("CopyInternal", side, j, "eta"), ew)
        t = b.add(("T", side, j), tw)
        b.lever(flag, [f], b.w(flag), LEVER_X["flag_to_F"] * N, f"flag-F:{side}{j}")
        b.pair(f, eta, cv)
        b.pair(eta, nx, cv)
        b.join(eta, t)
        b.lever(eta, [tgt], ew, LEVER_X["eta_to_input"] * N, f"eta-I:{side}{j}")
        out.append({"F": f, "eta": eta, "T": t})
    return out


def add_comparator(b: NmcBuilder, flag, value_a, value_b_bar, ctl_a, ctl_b):
    """Wire the value bits and the control vertices of both circuits to Flag.

    ``value_b_bar`` are circuit B's complemented value bits.  ``ctl_a`` are
    A's ``y3`` vertices and ``ctl_b`` B's ``z3`` vertices of the value-bit
    gates and the first gate above them.  Each A-side vertex feels Flag only
    when Flag is 0 and each B-side vertex only when Flag is 1; a natural A
    (B) control vertex pushes Flag toward 0 (1).
    """
    wf = b.w(flag)
    for v in value_a:
        b.join(flag, v)
        b.const(v, 0, wf)
    for v in value_b_bar:
        b.join(flag, v)
        b.const(v, 1, wf)
    for y in ctl_a:
        b.join(flag, y)
        b.const(y, 0, wf)
        b.const(flag, 1, b.w(y))
    for z in ctl_b:
        b.join(flag, z)
        b.const(z, 1, wf)
        b.const(flag, 0, b.w(z))
