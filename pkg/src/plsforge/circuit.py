"""Circuit-Flip instances over NOR netlists.

Operands are strings: ``x<i>`` names the i-th input (1-based) and ``g<id>``
names a gate.  Output bits are listed most significant first, so
``real_val`` reads them as an ordinary binary numeral.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

from .errors import DimensionError, InvalidInstance, NotADag

__all__ = [
    "Circuit",
    "CircuitBuilder",
    "eval_circuit",
    "eval_gates",
    "real_val",
    "real_next",
    "is_flip_local_opt",
    "reverse_topological_order",
    "augment_next_val",
    "bits_to_int",
    "int_to_bits",
    "all_inputs",
]

_OPERAND = re.compile(r"^(x|g)(\d+)$")


def _parse_operand(op):
    m = _OPERAND.match(op)
    if not m:
        raise InvalidInstance(f"bad operand {op!r}; expected x<i> or g<id>")
    return m.group(1), int(m.group(2))


@dataclass(frozen=True)
class Circuit:
    """NOR netlist.  ``gates`` is a sequence of ``(id, opA, opB)``.

    ``next_outputs`` is set only for pre-augmented circuits, whose first
    block of outputs is an improving neighbor chosen by the netlist itself.
    """

    n: int
    gates: tuple
    outputs: tuple
    next_outputs: tuple | None = None
    order: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInstance("a circuit needs at least one input")
        gates = tuple((int(g), str(a), str(b)) for g, a, b in self.gates)
        ids = [g for g, _, _ in gates]
        if len(set(ids)) != len(ids):
            raise InvalidInstance("duplicate gate id")
        known = set(ids)
        deps = {}
        for g, a, b in gates:
            ds = []
            for op in (a, b):
                kind, k = _parse_operand(op)
                if kind == "x":
                    if not 1 <= k <= self.n:
                        raise InvalidInstance(f"gate g{g} reads input x{k} but n={self.n}")
                else:
                    if k not in known:
                        raise InvalidInstance(f"gate g{g} reads unknown gate g{k}")
                    ds.append(k)
            deps[g] = ds
        outputs = tuple(self._gate_ref(o, known) for o in self.outputs)
        if not outputs:
            raise InvalidInstance("a circuit needs at least one output")
        nxt = None
        if self.next_outputs is not None:
            nxt = tuple(self._gate_ref(o, known) for o in self.next_outputs)
            if len(nxt) != self.n:
                raise InvalidInstance(f"next-outputs must list {self.n} gates, got {len(nxt)}")
        object.__setattr__(self, "gates", gates)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "next_outputs", nxt)
        object.__setattr__(self, "order", _topo(ids, deps))

    @staticmethod
    def _gate_ref(o, known):
        if isinstance(o, int):
            k = o
        else:
            kind, k = _parse_operand(str(o))
            if kind != "g":
                raise InvalidInstance(f"outputs must name gates, got {o!r}")
        if k not in known:
            raise InvalidInstance(f"output refers to unknown gate g{k}")
        return k

    @property
    def m(self):
        return len(self.outputs)

    def gate_map(self):
        return {g: (a, b) for g, a, b in self.gates}


def _topo(ids, deps):
    """Kahn's algorithm, preferring list order; a leftover means a cycle."""
    indeg = {g: len(deps[g]) for g in ids}
    users = {g: [] for g in ids}
    for g in ids:
        for d in deps[g]:
            users[d].append(g)
    pos = {g: i for i, g in enumerate(ids)}
    import heapq
    heap = [(pos[g], g) for g in ids if indeg[g] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, g = heapq.heappop(heap)
        out.append(g)
        for u in users[g]:
            indeg[u] -= 1
            if indeg[u] == 0:
                heapq.heappush(heap, (pos[u], u))
    if len(out) != len(ids):
        stuck = sorted(g for g in ids if indeg[g] > 0)
        raise NotADag(f"gates {stuck[:5]} lie on a cycle")
    return tuple(out)


# ---------------------------------------------------------------- evaluation

def _check_input(c, s):
    s = tuple(int(b) for b in s)
    if len(s) != c.n:
        raise DimensionError(f"input has {len(s)} bits, circuit has {c.n} inputs")
    if any(b not in (0, 1) for b in s):
        raise DimensionError("input bits must be 0 or 1")
    return s


def eval_gates(c: Circuit, s: Sequence[int]) -> dict:
    """Value of every gate on input ``s``."""
    s = _check_input(c, s)
    gm = c.gate_map()
    val = {}

    def read(op):
        if op[0] == "x":
            return s[int(op[1:]) - 1]
        return val[int(op[1:])]

    for g in c.order:
        a, b = gm[g]
        val[g] = 0 if (read(a) or read(b)) else 1
    return val


def eval_circuit(c: Circuit, s: Sequence[int]) -> tuple:
    val = eval_gates(c, s)
    return tuple(val[g] for g in c.outputs)


def bits_to_int(bits) -> int:
    v = 0
    for b in bits:
        v = 2 * v + int(b)
    return v


def int_to_bits(v: int, width: int) -> tuple:
    return tuple((v >> (width - 1 - k)) & 1 for k in range(width))


def all_inputs(n):
    return [int_to_bits(v, n) for v in range(2 ** n)]


def real_val(c: Circuit, s) -> int:
    return bits_to_int(eval_circuit(c, s))


def real_next(c: Circuit, s) -> tuple:
    """Lowest-index one-bit flip that strictly raises the value, else ``s``."""
    s = _check_input(c, s)
    base = real_val(c, s)
    for j in range(c.n):
        t = list(s)
        t[j] ^= 1
        if real_val(c, t) > base:
            return tuple(t)
    return s


def is_flip_local_opt(c: Circuit, s) -> bool:
    s = _check_input(c, s)
    return real_next(c, s) == s


# ---------------------------------------------------------------- ordering

def reverse_topological_order(c: Circuit) -> dict:
    """Number gates so that no gate reads a lower-numbered gate.

    Value bits come first, least significant bit at index 1 (so a heavier
    gadget always means a more significant bit).  Gates driving the
    improving-neighbor outputs take the next ``n`` indices, neighbor bit
    ``j`` at ``m + j``.  Every output gate must be a sink.
    """
    gm = c.gate_map()
    users = {g: 0 for g in gm}
    for g, (a, b) in gm.items():
        for op in {a, b}:
            if op[0] == "g":
                users[int(op[1:])] += 1
    pinned = {}
    for k, g in enumerate(reversed(c.outputs), start=1):
        if g in pinned:
            raise InvalidInstance(f"gate g{g} drives two outputs")
        pinned[g] = k
    if c.next_outputs is not None:
        for j, g in enumerate(c.next_outputs, start=1):
            if g in pinned:
                raise InvalidInstance(f"gate g{g} drives two outputs")
            pinned[g] = c.m + j
    for g in pinned:
        if users[g]:
            raise InvalidInstance(f"output gate g{g} feeds other gates; buffer it first")
    index = dict(pinned)
    nxt = len(pinned) + 1
    # the remaining gates in reverse topological order (sinks first)
    for g in reversed(c.order):
        if g not in index:
            index[g] = nxt
            nxt += 1
    return index


# ---------------------------------------------------------------- building

class CircuitBuilder:
    """Small NOR-only lowering helper: every method emits NOR gates."""

    def __init__(self, n):
        self.n = n
        self.gates = []
        self._next = 1

    def nor(self, a, b):
        g = self._next
        self._next += 1
        self.gates.append((g, a, b))
        return f"g{g}"

    def not_(self, a):
        return self.nor(a, a)

    def buf(self, a):
        return self.not_(self.not_(a))

    def or_(self, a, b):
        return self.not_(self.nor(a, b))

    def and_(self, a, b):
        return self.nor(self.not_(a), self.not_(b))

    def xor(self, a, b):
        return self.nor(self.nor(a, b), self.and_(a, b))

    def xnor(self, a, b):
        return self.not_(self.xor(a, b))

    def copy_circuit(self, c: Circuit, inputs):
        """Inline ``c`` reading operand names ``inputs``; return its output refs."""
        rename = {}

        def op(o):
            if o[0] == "x":
                return inputs[int(o[1:]) - 1]
            return rename[int(o[1:])]

        gm = c.gate_map()
        for g in c.order:
            a, b = gm[g]
            rename[g] = self.nor(op(a), op(b))
        return [rename[g] for g in c.outputs]

    def greater_than(self, a_bits, b_bits):
        """Ref that is 1 iff the MSB-first numeral ``a`` exceeds ``b``."""
        terms = []
        prefix_eq = None
        for a, b in zip(a_bits, b_bits):
            win = self.and_(a, self.not_(b))
            terms.append(win if prefix_eq is None else self.and_(win, prefix_eq))
            eq = self.xnor(a, b)
            prefix_eq = eq if prefix_eq is None else self.and_(prefix_eq, eq)
        out = terms[0]
        for t in terms[1:]:
            out = self.or_(out, t)
        return out

    def build(self, outputs, next_outputs=None):
        outs = [int(o[1:]) for o in outputs]
        nxt = None if next_outputs is None else [int(o[1:]) for o in next_outputs]
        return Circuit(self.n, tuple(self.gates), tuple(outs), nxt)


def augment_next_val(c: Circuit) -> Circuit:
    """Combined circuit whose outputs are ``real_next(s)`` then ``C(s)``.

    Built from ``n + 1`` copies of ``c`` (one on ``s`` and one per flipped
    bit), a greater-than comparator per flip, a priority chain choosing the
    lowest improving flip, and an XOR per input bit.  Returned with
    ``next_outputs`` set.  A circuit that already carries next outputs is
    returned unchanged.
    """
    if c.next_outputs is not None:
        return c
    b = CircuitBuilder(c.n)
    xs = [f"x{i}" for i in range(1, c.n + 1)]
    base = b.copy_circuit(c, xs)
    improves = []
    for j in range(c.n):
        flipped = list(xs)
        flipped[j] = b.not_(xs[j])
        improves.append(b.greater_than(b.copy_circuit(c, flipped), base))
    nxt = []
    none_before = None
    for j in range(c.n):
        sel = improves[j] if none_before is None else b.and_(improves[j], none_before)
        nxt.append(b.xor(xs[j], sel))
        blocked = b.not_(improves[j])
        none_before = blocked if none_before is None else b.and_(none_before, blocked)
    vals = [b.buf(v) for v in base]
    return b.build(vals, nxt)
