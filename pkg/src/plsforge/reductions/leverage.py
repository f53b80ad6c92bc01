"""Leverage chains: let a light vertex nudge a heavy one without being dragged.

A chain between input ``A`` and output ``B`` has ``x + 1`` blocks of four
vertices.  Block ``k`` holds two "odd" vertices of weight
``wB / 2**(x + 2 - k) + eps`` and two "even" vertices of weight
``wA / 2**k - eps``.  ``A`` feeds the odd pair of block 1, each odd vertex
sees both even vertices of its block, even vertex ``j`` feeds odd vertex ``j``
of the next block, and the last even pair touches ``B`` (or every target in a
fan-out).  At a local optimum the odd vertices equal ``not A`` and the even
vertices equal ``A``, so every target sees ``wA / 2**x - 2 eps`` pushing it
away from ``A`` and ``A`` sees ``wB / 2**x + 2 eps`` pushing it to stay.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import InvalidArgument
from ..games_core import VertexWeightedGraph, as_weight

__all__ = ["LeverageChain", "leverage_weights", "build_leverage", "leverage_biases",
           "leverage_settle"]


@dataclass(frozen=True)
class LeverageChain:
    """Weights and wiring of one chain; vertex ``(k, j)`` is block ``k``, slot ``j``.

    Slots 1 and 2 are the odd pair, 3 and 4 the even pair.
    """
    wA: Fraction
    wB: Fraction
    x: int
    eps: Fraction
    odd: tuple      # odd-pair weight per block
    even: tuple     # even-pair weight per block

    @property
    def blocks(self):
        return self.x + 1

    def vertices(self):
        return [(k, j) for k in range(1, self.blocks + 1) for j in (1, 2, 3, 4)]

    def weight(self, k, j):
        return self.odd[k - 1] if j in (1, 2) else self.even[k - 1]

    def internal_edges(self):
        out = []
        for k in range(1, self.blocks + 1):
            for j in (1, 2):
                for e in (3, 4):
                    out.append(((k, j), (k, e)))
            if k < self.blocks:
                out.append(((k, 3), (k + 1, 1)))
                out.append(((k, 4), (k + 1, 2)))
        return out

    @property
    def entry(self):
        return [(1, 1), (1, 2)]

    @property
    def exit(self):
        return [(self.blocks, 3), (self.blocks, 4)]

    @property
    def target_bias(self):
        return 2 * self.even[-1]

    @property
    def source_bias(self):
        return 2 * self.odd[0]


def leverage_weights(wA, wB, x, eps) -> LeverageChain:
    wA = Fraction(as_weight(wA, positive=True, name="wA"))
    wB = Fraction(as_weight(wB, positive=True, name="wB"))
    eps = Fraction(as_weight(eps, positive=True, name="eps"))
    if not isinstance(x, int) or x < 0:
        raise InvalidArgument(f"x must be a nonnegative integer, got {x!r}")
    blocks = x + 1
    odd = tuple(wB / 2 ** (x + 2 - k) + eps for k in range(1, blocks + 1))
    even = tuple(wA / 2 ** k - eps for k in range(1, blocks + 1))
    if even[-1] <= 0:
        raise InvalidArgument("eps too large: the last even pair would have no weight")
    return LeverageChain(wA, wB, x, eps, odd, even)


def build_leverage(wA, wB, x, eps):
    """Standalone gadget graph: vertex 0 is ``A``, vertex 1 is ``B``.

    Returns ``(graph, chain, index)`` with ``index`` mapping ``(k, j)`` to ids.
    """
    ch = leverage_weights(wA, wB, x, eps)
    index = {kj: 2 + t for t, kj in enumerate(ch.vertices())}
    weights = [ch.wA, ch.wB] + [ch.weight(*kj) for kj in ch.vertices()]
    edges = [(0, index[v]) for v in ch.entry]
    edges += [(index[u], index[v]) for u, v in ch.internal_edges()]
    edges += [(index[v], 1) for v in ch.exit]
    g = VertexWeightedGraph(tuple(_tidy(w) for w in weights), tuple(edges))
    return g, ch, index


def _tidy(w):
    w = Fraction(w)
    return w.numerator if w.denominator == 1 else w


def leverage_settle(chain: LeverageChain, a_value: int) -> dict:
    """Chain values forced by ``A``: odd slots take ``not A``, even slots ``A``."""
    return {kj: (1 - a_value if kj[1] in (1, 2) else a_value) for kj in chain.vertices()}


def leverage_biases(wA, wB, x, eps):
    """``(bias on B away from A, bias on A toward itself)`` at the forced state."""
    ch = leverage_weights(wA, wB, x, eps)
    return ch.target_bias, ch.source_bias
