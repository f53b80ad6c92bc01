"""Brute-force ground truth and a harness that checks reductions against it.

Everything here trades speed for obviousness: cuts are enumerated in Gray
code order with vertex 0 fixed to side 0, congestion profiles are enumerated
as a product of all simple paths, and each candidate is judged by a direct
recount of the weights involved.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass, field

from .circuit import Circuit, all_inputs, is_flip_local_opt
from .congestion import (CongestionGame, br_dynamics, enumerate_paths, is_pne,
                         is_pne_exhaustive, random_simple_path)
from .errors import InvalidArgument, NotCanonical, StepCapExceeded, TooLarge
from .games_core import flip_dynamics, is_local_optimum
from .lemmas import LEMMAS, check_gadget_lemma, run_gadget_lemma
from .reductions import (complementary_on_middle, embed_cut_to_multi, embed_cut_to_sp,
                         intended_configuration, map_back_cf, map_back_multi, map_back_sp)
from .search import (MAX_FREE, PinnedOptima, gray_search, pinned_local_optima,
                     weighted_adjacency)

__all__ = [
    "MAX_CUT_VERTICES",
    "MAX_PROFILES",
    "MAX_FREE",
    "brute_local_optima",
    "brute_pne",
    "pinned_local_optima",
    "PinnedOptima",
    "VerificationReport",
    "verify_reduction",
    "check_gadget_lemma",
    "run_gadget_lemma",
    "LEMMAS",
]

MAX_CUT_VERTICES = 24
MAX_PROFILES = 10 ** 7
MODES = ("embed-check", "dynamics-sample", "exhaustive")


# ---------------------------------------------------------------- cuts

def brute_local_optima(g, cap=MAX_CUT_VERTICES):
    """Every locally optimal cut with vertex 0 on side 0, as a set of tuples."""
    n = g.n
    if n > cap:
        raise TooLarge(f"{n} vertices exceed the enumeration cap of {cap}")
    if n == 0:
        return {()}
    adj = weighted_adjacency(g)
    side = [0] * n
    out = set()
    for _ in gray_search(adj, side, list(range(1, n)), range(n)):
        out.add(tuple(side))
    return out


# ---------------------------------------------------------------- profiles

def brute_pne(game: CongestionGame, cap=MAX_PROFILES):
    """Every exact pure Nash equilibrium, as a set of profiles."""
    paths = [enumerate_paths(game.network, p.origin, p.destination) for p in game.players]
    total = 1
    for ps in paths:
        total *= len(ps)
        if total > cap:
            raise TooLarge(f"more than {cap} profiles to enumerate")
    return {prof for prof in itertools.product(*paths) if is_pne_exhaustive(game, prof)}


# ---------------------------------------------------------------- reports

@dataclass
class VerificationReport:
    instance_id: str
    direction: str
    checked: int = 0
    counterexamples: list = field(default_factory=list)
    unconverged: int = 0
    kind: str = ""
    mode: str = ""

    @property
    def success(self) -> bool:
        return not self.counterexamples

    def to_dict(self):
        return {
            "instance": self.instance_id,
            "kind": self.kind,
            "mode": self.mode,
            "direction": self.direction,
            "checked": self.checked,
            "unconverged": self.unconverged,
            "counterexamples": [repr(c) for c in self.counterexamples],
            "success": self.success,
        }


def instance_id(obj) -> str:
    return hashlib.sha256(repr(obj).encode()).hexdigest()[:12]


def _random_profile(game, rng):
    return tuple(random_simple_path(game.network, p.origin, p.destination, rng)
                 for p in game.players)


def _game_reduction(kind, source, game, sm, mode, report, seed, runs, max_steps):
    embed, back = ((embed_cut_to_sp, map_back_sp) if kind == "mc2sp"
                   else (embed_cut_to_multi, map_back_multi))
    if mode == "embed-check":
        report.direction = "forward"
        for cut in sorted(brute_local_optima(source)):
            for s in (cut, tuple(1 - b for b in cut)):
                prof = embed(sm, s)
                ok = is_pne_exhaustive(game, prof) if kind == "mc2sp" else is_pne(game, prof)
                report.checked += 1
                if not ok:
                    report.counterexamples.append(("embedded cut is not an equilibrium", s))
        return
    report.direction = "backward"
    if mode == "exhaustive":
        profiles = sorted(brute_pne(game))
    else:
        rng = random.Random(seed)
        profiles = []
        for _ in range(runs):
            start = _random_profile(game, rng)
            try:
                prof, _ = br_dynamics(game, start, schedule="seeded-random",
                                      max_steps=max_steps, seed=rng.randrange(2 ** 32))
            except StepCapExceeded:
                report.unconverged += 1
                continue
            profiles.append(prof)
    for prof in profiles:
        report.checked += 1
        try:
            cut = back(sm, prof)
        except NotCanonical as exc:
            report.counterexamples.append(("equilibrium does not map back", str(exc)))
            continue
        if not is_local_optimum(source, cut):
            report.counterexamples.append(("mapped cut is not locally optimal", cut))
        if kind == "nmc2multi" and not complementary_on_middle(sm, prof):
            report.counterexamples.append(("complementary player off its middle edge", cut))


def _cf_reduction(c: Circuit, g, sm, mode, report, seed, runs, max_steps):
    if mode == "exhaustive":
        report.direction = "backward"
        for cut in brute_local_optima(g):       # raises TooLarge on any real instance
            report.checked += 1
            s = map_back_cf(sm, cut)
            if not is_flip_local_opt(c, s):
                report.counterexamples.append(("local optimum maps to a non-optimal input", s))
        return
    if mode == "embed-check":
        report.direction = "forward"
        for s in all_inputs(c.n):
            if not is_flip_local_opt(c, s):
                continue
            cut = intended_configuration(c, g, sm, s)
            report.checked += 1
            if not is_local_optimum(g, cut):
                roles = sm.data["roles"]
                bad = [v for v in range(g.n) if _unhappy(g, cut, v)]
                report.counterexamples.append(
                    ("intended configuration is not a local optimum", s,
                     [tuple(roles[v]) for v in bad[:5]]))
        return
    report.direction = "backward"
    rng = random.Random(seed)
    for _ in range(runs):
        start = tuple(rng.randrange(2) for _ in range(g.n))
        cut, _, converged = flip_dynamics(g, start, schedule="max-gain", cap=max_steps)
        if not converged:
            report.unconverged += 1
            continue
        report.checked += 1
        s = map_back_cf(sm, cut)
        if not is_flip_local_opt(c, s):
            report.counterexamples.append(("local optimum maps to a non-optimal input", s))


def _unhappy(g, cut, v):
    same = sum(g.weights[u] for u in g.adj[v] if cut[u] == cut[v])
    other = sum(g.weights[u] for u in g.adj[v] if cut[u] != cut[v])
    return same > other


def verify_reduction(kind, source, compiled, mode, *, seed=0, runs=20, max_steps=10 ** 6,
                     instance=None) -> VerificationReport:
    """Check one compiled reduction against brute force or sampled dynamics.

    ``kind`` is ``mc2sp``, ``nmc2multi``, ``nmc2mc`` or ``cf2nmc``;
    ``compiled`` is the ``(target, solution map)`` pair the compiler
    returned.  ``embed-check`` pushes every source optimum forward,
    ``dynamics-sample`` runs seeded dynamics on the target and maps the
    results back, ``exhaustive`` maps back every target equilibrium.
    Dynamics runs that hit ``max_steps`` are counted in ``unconverged``.
    """
    if mode not in MODES:
        raise InvalidArgument(f"unknown mode {mode!r}; expected one of {MODES}")
    target, sm = compiled
    report = VerificationReport(instance or instance_id((kind, source)), "", kind=kind, mode=mode)
    if kind in ("mc2sp", "nmc2multi"):
        _game_reduction(kind, source, target, sm, mode, report, seed, runs, max_steps)
    elif kind == "cf2nmc":
        _cf_reduction(source, target, sm, mode, report, seed, runs, max_steps)
    elif kind == "nmc2mc":
        report.direction = "both"
        mine, theirs = brute_local_optima(source), brute_local_optima(target)
        report.checked = len(mine) + len(theirs)
        for cut in sorted(mine ^ theirs):
            report.counterexamples.append(("optimum in only one instance", cut))
    else:
        raise InvalidArgument(f"unknown reduction kind {kind!r}")
    return report


