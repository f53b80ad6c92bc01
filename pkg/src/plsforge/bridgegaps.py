"""(1+eps)^3-approximate equilibria for Node-Max-Cut by rounding and gap bridging.

The pipeline: round every weight down to a power of ``1 + eps`` (exponent
found by exact search), normalize so the lightest rounded weight is 1,
group sorted weights whose consecutive ratio stays within ``ceil(n/eps)``,
shrink every gap between groups to exactly that ratio, then run
eps-best-response flips on the bridged weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidArgument
from .games_core import (VertexWeightedGraph, as_weight, is_approx_equilibrium_nmc,
                         make_cut, nmc_potential)

__all__ = [
    "floor_log",
    "RoundedInstance",
    "GroupedInstance",
    "BridgeGapsResult",
    "round_weights",
    "group_weights",
    "bridge_gaps",
    "check_cross_group_domination",
    "flip_bound",
    "run_bridgegaps",
    "bridgegaps_solve",
    "BridgeGaps",
]


def _positive_eps(eps):
    eps = as_weight(eps, name="eps")
    if eps <= 0:
        raise InvalidArgument(f"eps must be positive, got {eps}")
    return Fraction(eps)


def floor_log(w, base) -> int:
    """Largest integer ``k`` with ``base**k <= w``, exactly (``base > 1``)."""
    w = Fraction(w)
    base = Fraction(base)
    if w <= 0 or base <= 1:
        raise InvalidArgument("floor_log needs w > 0 and base > 1")
    # bracket, then bisect on the exponent
    if w >= 1:
        lo, hi = 0, 1
        while base ** hi <= w:
            lo, hi = hi, 2 * hi
    else:
        lo, hi = -1, 0
        while base ** lo > w:
            lo, hi = 2 * lo, lo
    # invariant: base**lo <= w < base**hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if base ** mid <= w:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class RoundedInstance:
    graph: VertexWeightedGraph
    eps: Fraction
    exponents: tuple        # normalized: the lightest vertex has exponent 0
    offset: int             # raw exponent of the lightest vertex

    @property
    def base(self):
        return 1 + self.eps

    @property
    def weights(self):
        return tuple(self.base ** k for k in self.exponents)

    @property
    def original_scale_weights(self):
        return tuple(self.base ** (k + self.offset) for k in self.exponents)

    @property
    def d_eps(self):
        return len(set(self.exponents))


@dataclass(frozen=True)
class GroupedInstance:
    rounded: RoundedInstance
    threshold: int          # ceil(n/eps), or ceil(maxdeg/eps) for the degree variant
    groups: tuple           # tuples of vertex ids, lightest group first
    divisors: tuple = ()
    bridged: tuple = ()

    def group_of(self):
        out = {}
        for j, g in enumerate(self.groups):
            for v in g:
                out[v] = j
        return out


@dataclass(frozen=True)
class BridgeGapsResult:
    cut: tuple
    flips: int
    d_eps: int
    bound: int
    grouped: GroupedInstance
    potential_drops: tuple
    verified: bool


def round_weights(g: VertexWeightedGraph, eps) -> RoundedInstance:
    eps = _positive_eps(eps)
    base = 1 + eps
    cache = {}
    raw = []
    for w in g.weights:
        if w not in cache:
            cache[w] = floor_log(w, base)
        raw.append(cache[w])
    offset = min(raw) if raw else 0
    return RoundedInstance(g, eps, tuple(k - offset for k in raw), offset)


def _threshold(g, eps, delta_variant):
    size = g.max_degree() if delta_variant else g.n
    return max(1, math.ceil(Fraction(max(size, 1)) / eps))


def group_weights(r: RoundedInstance, eps=None, delta_variant=False) -> GroupedInstance:
    """Greedy grouping of the sorted rounded weights (ratio test is inclusive)."""
    eps = r.eps if eps is None else _positive_eps(eps)
    t = _threshold(r.graph, eps, delta_variant)
    order = sorted(range(len(r.exponents)), key=lambda v: (r.exponents[v], v))
    w = r.weights
    groups = []
    for v in order:
        if groups and w[v] <= t * w[groups[-1][-1]]:
            groups[-1].append(v)
        else:
            groups.append([v])
    return GroupedInstance(r, t, tuple(tuple(gr) for gr in groups))


def bridge_gaps(gr: GroupedInstance) -> GroupedInstance:
    """Divide every heavier group so each seam ratio becomes the threshold."""
    w = gr.rounded.weights
    t = gr.threshold
    bridged = list(w)
    divisors = []
    scale = Fraction(1)
    for j in range(len(gr.groups)):
        if j > 0:
            prev, cur = gr.groups[j - 1], gr.groups[j]
            d = Fraction(min(w[v] for v in cur)) / max(w[v] for v in prev) / t
            divisors.append(d)
            scale *= d
        for v in gr.groups[j]:
            bridged[v] = Fraction(w[v]) / scale
    bridged = tuple(x.numerator if x.denominator == 1 else x for x in bridged)
    return GroupedInstance(gr.rounded, t, gr.groups, tuple(divisors), bridged)


def check_cross_group_domination(gr: GroupedInstance, eps=None, size=None) -> bool:
    """``size * w''_j <= eps * w''_i`` whenever j sits in a lighter group than i."""
    eps = gr.rounded.eps if eps is None else Fraction(eps)
    size = gr.rounded.graph.n if size is None else size
    heaviest_below = None
    for grp in gr.groups:
        lightest = min(gr.bridged[v] for v in grp)
        if heaviest_below is not None and size * heaviest_below > eps * lightest:
            return False
        top = max(gr.bridged[v] for v in grp)
        heaviest_below = top if heaviest_below is None else max(heaviest_below, top)
    return True


def flip_bound(m, eps, threshold, d_eps) -> Fraction:
    """(m / eps) * threshold ** (2 * D_eps)."""
    return Fraction(m) / Fraction(eps) * Fraction(threshold) ** (2 * d_eps)


def _side_sums(adj, w, cut, v):
    same = other = 0
    for u in adj[v]:
        if cut[u] == cut[v]:
            same += w[u]
        else:
            other += w[u]
    return same, other


def run_bridgegaps(g: VertexWeightedGraph, eps, start=None, schedule="first",
                   delta_variant=False, max_flips=None) -> BridgeGapsResult:
    eps = _positive_eps(eps)
    if schedule not in ("first", "max-gain"):
        raise InvalidArgument(f"unknown schedule {schedule!r}")
    cut = [0] * g.n if start is None else list(make_cut(start))
    if len(cut) != g.n:
        raise InvalidArgument("start cut has the wrong length")
    rounded = round_weights(g, eps)
    grouped = bridge_gaps(group_weights(rounded, eps, delta_variant))
    w = grouped.bridged
    factor = 1 + eps
    adj = g.adj
    drops = []

    def violation(v):
        same, other = _side_sums(adj, w, cut, v)
        return same - factor * other, same - other

    flips = 0
    while True:
        pick = None
        if schedule == "first":
            for v in range(g.n):
                if violation(v)[0] > 0:
                    pick = v
                    break
        else:
            best = 0
            for v in range(g.n):
                excess, gain = violation(v)
                if excess > 0 and w[v] * gain > best:
                    best, pick = w[v] * gain, v
        if pick is None:
            break
        same, other = _side_sums(adj, w, cut, pick)
        drops.append(w[pick] * (same - other))
        cut[pick] ^= 1
        flips += 1
        if max_flips is not None and flips >= max_flips:
            break
    cut = tuple(cut)
    bound = flip_bound(g.m, eps, grouped.threshold, rounded.d_eps)
    verified = is_approx_equilibrium_nmc(g, cut, factor ** 3 - 1)
    return BridgeGapsResult(cut, flips, rounded.d_eps, bound, grouped, tuple(drops), verified)


def bridgegaps_solve(g: VertexWeightedGraph, eps, start=None, schedule="first",
                     delta_variant=False):
    """Return ``(cut, flip_count)``."""
    res = run_bridgegaps(g, eps, start, schedule, delta_variant)
    return res.cut, res.flips


class BridgeGaps:
    """Estimator-style front end; ``fit`` stores ``cut_``, ``flips_`` and ``result_``."""

    def __init__(self, eps=Fraction(1, 2), schedule="first", delta_variant=False):
        self.eps = eps
        self.schedule = schedule
        self.delta_variant = delta_variant

    def get_params(self, deep=True):
        return {"eps": self.eps, "schedule": self.schedule, "delta_variant": self.delta_variant}

    def set_params(self, **params):
        for k, v in params.items():
            if k not in self.get_params():
                raise InvalidArgument(f"unknown parameter {k!r}")
            setattr(self, k, v)
        return self

    def fit(self, g, start=None):
        self.result_ = run_bridgegaps(g, self.eps, start, self.schedule, self.delta_variant)
        self.cut_ = self.result_.cut
        self.flips_ = self.result_.flips
        return self

    def potential(self, g, cut):
        return nmc_potential(g.with_weights(self.result_.grouped.bridged), cut)
