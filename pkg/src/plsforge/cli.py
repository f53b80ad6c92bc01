"""Command-line front end.

Exit codes: 0 on success, 1 when a verification fails, 2 on usage, parse
or instance errors.  ``--format tsv`` prints tab-separated ``key value``
rows instead of ``key: value`` lines.  ``PLSFORGE_STEP_CAP`` overrides the
default cap on dynamics steps.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import formats
from .bridgegaps import run_bridgegaps
from .circuit import Circuit
from .congestion import CongestionGame, br_dynamics, random_simple_path
from .errors import NotCanonical, ParseError, PlsForgeError, StepCapExceeded
from .games_core import (EdgeWeightedGraph, VertexWeightedGraph, cut_value,
                         flip_dynamics, is_local_optimum)
from .lemmas import LEMMAS, run_gadget_lemma
from .oracle import brute_local_optima, brute_pne, verify_reduction
from .reductions import (SolutionMap, map_back_cf, map_back_multi, map_back_sp, n_min,
                         reduce_cf_to_nmc, reduce_mc_to_sp, reduce_nmc_to_multi)

__all__ = ["main", "step_cap", "DEFAULT_STEP_CAP"]

DEFAULT_STEP_CAP = 10 ** 6
REDUCTIONS = ("mc2sp", "nmc2mc", "nmc2multi", "cf2nmc")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def step_cap(default=DEFAULT_STEP_CAP):
    raw = os.environ.get("PLSFORGE_STEP_CAP")
    if raw is None:
        return default
    try:
        cap = int(raw)
    except ValueError:
        raise UsageError(f"PLSFORGE_STEP_CAP must be an integer, got {raw!r}") from None
    if cap <= 0:
        raise UsageError("PLSFORGE_STEP_CAP must be positive")
    return cap


def _fraction(text):
    try:
        value = Fraction(formats.parse_weight(text))
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return value


def _show(value):
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (int, Fraction)):
        return formats.format_weight(value) if value >= 0 else "-" + formats.format_weight(-value)
    if isinstance(value, tuple) and all(isinstance(b, int) and b in (0, 1) for b in value):
        return "".join(str(b) for b in value)
    return str(value)


def _print(rows, fmt, out):
    for key, value in rows:
        if fmt == "tsv":
            out.write(f"{key}\t{_show(value)}\n")
        else:
            out.write(f"{key}: {_show(value)}\n")


def _load(path, kind=None):
    _, obj = formats.read_file(path, kind)
    return obj


# ---------------------------------------------------------------- commands

def cmd_solve_nmc(args):
    g = _load(args.graph, "graph")
    start = _load(args.start, "cut") if args.start else (0,) * g.n
    cap = args.max_steps or step_cap()
    cut, flips, converged = flip_dynamics(g, start, schedule=args.schedule, cap=cap)
    ok = converged and is_local_optimum(g, cut)
    rows = [("cut", cut), ("flips", flips), ("converged", converged),
            ("cut_value", cut_value(g, cut)), ("local_optimum", ok)]
    return rows, 0 if ok else 1


def cmd_bridgegaps(args):
    g = _load(args.graph, "graph")
    if not isinstance(g, VertexWeightedGraph):
        raise UsageError("bridgegaps needs a node-weighted (nmc) graph")
    res = run_bridgegaps(g, args.eps, schedule=args.schedule, delta_variant=args.delta_variant)
    rows = [("cut", res.cut), ("flips", res.flips), ("d_eps", res.d_eps),
            ("flip_bound", res.bound), ("approx_factor", (1 + args.eps) ** 3),
            ("verified", res.verified)]
    return rows, 0 if res.verified else 1


def _compile(kind, src, scale):
    if kind == "mc2sp":
        if not isinstance(src, EdgeWeightedGraph):
            raise UsageError("mc2sp reads an edge-weighted (mc) graph")
        return reduce_mc_to_sp(src), "game"
    if kind == "nmc2multi":
        if not isinstance(src, VertexWeightedGraph):
            raise UsageError("nmc2multi reads a node-weighted (nmc) graph")
        return reduce_nmc_to_multi(src), "game"
    if kind == "nmc2mc":
        if not isinstance(src, VertexWeightedGraph):
            raise UsageError("nmc2mc reads a node-weighted (nmc) graph")
        return (src.as_edge_weighted(), SolutionMap("nmc2mc", {"n": src.n})), "graph"
    if not isinstance(src, Circuit):
        raise UsageError("cf2nmc reads a netlist")
    return reduce_cf_to_nmc(src, scale if scale is not None else n_min(src)), "graph"


def _source_kind(kind):
    return "netlist" if kind == "cf2nmc" else "graph"


def cmd_reduce(args):
    src = _load(args.input, _source_kind(args.kind))
    (target, sm), out_kind = _compile(args.kind, src, args.scale)
    note = f"{args.kind} of {os.path.basename(args.input)}"
    if args.kind == "cf2nmc":
        note += f" scale {sm.data['N']}"
    formats.write_file(args.output, out_kind, target, note)
    if args.roles:
        formats.write_file(args.roles, "roles", sm, note)
    rows = [("kind", args.kind), ("output", args.output)]
    if out_kind == "game":
        rows += [("players", target.num_players), ("edges", len(target.network.edges))]
    else:
        rows += [("vertices", target.n), ("edges", target.m)]
    if args.kind == "cf2nmc":
        rows += [("scale", sm.data["N"]), ("scale_min", sm.data["n_min"])]
    return rows, 0


def cmd_mapback(args):
    sm = _load(args.roles, "roles")
    if sm.kind != args.kind:
        raise UsageError(f"roles file is for {sm.kind}, not {args.kind}")
    if args.kind in ("mc2sp", "nmc2multi"):
        profile = _load(args.solution, "profile")
        back = map_back_sp if args.kind == "mc2sp" else map_back_multi
        try:
            cut = back(sm, profile)
        except NotCanonical as exc:
            return [("error", str(exc))], 1
        return [("cut", cut)], 0
    cut = _load(args.solution, "cut")
    if args.kind == "nmc2mc":
        return [("cut", cut)], 0
    return [("input", map_back_cf(sm, cut))], 0


def _random_profile(game: CongestionGame, rng):
    return tuple(random_simple_path(game.network, p.origin, p.destination, rng)
                 for p in game.players)


def cmd_dynamics(args):
    _, obj = formats.read_file(args.instance)
    cap = args.max_steps or step_cap()
    rng = random.Random(args.seed)
    if isinstance(obj, CongestionGame):
        start = _load(args.start, "profile") if args.start else _random_profile(obj, rng)
        schedule = args.schedule or "round-robin"
        try:
            prof, trace = br_dynamics(obj, start, schedule=schedule, max_steps=cap, seed=args.seed)
            converged = True
        except StepCapExceeded as exc:
            prof, trace, converged = exc.profile, exc.trace, False
        if args.output:
            formats.write_file(args.output, "profile", prof, f"br dynamics seed {args.seed}")
        rows = [("steps", len(trace)), ("converged", converged)]
        rows += [("path", " ".join(str(k) for k in p)) for p in prof]
        return rows, 0 if converged else 1
    if isinstance(obj, VertexWeightedGraph):
        start = (_load(args.start, "cut") if args.start
                 else tuple(rng.randrange(2) for _ in range(obj.n)))
        cut, flips, converged = flip_dynamics(obj, start, schedule=args.schedule or "max-gain",
                                              cap=cap)
        if args.output:
            formats.write_file(args.output, "cut", cut, f"flip dynamics seed {args.seed}")
        return [("cut", cut), ("flips", flips), ("converged", converged)], 0 if converged else 1
    raise UsageError("dynamics runs on a game or an nmc graph")


def cmd_verify(args):
    src = _load(args.source, _source_kind(args.kind))
    _, target = formats.read_file(args.compiled)
    if args.roles:
        sm = _load(args.roles, "roles")
    else:
        scale = args.scale
        if args.kind == "cf2nmc" and scale is None and isinstance(target, VertexWeightedGraph):
            scale = n_min(src)
        (expect, sm), out_kind = _compile(args.kind, src, scale)
        _, expect = formats.parse(formats.emit(out_kind, expect, ""), out_kind)
        if expect != target:
            return [("error", "compiled file does not match a fresh compile of the source")], 1
    report = verify_reduction(args.kind, src, (target, sm), args.mode, seed=args.seed,
                              runs=args.runs, max_steps=args.max_steps or step_cap())
    if args.output:
        formats.write_file(args.output, "report", report, f"verify {args.kind} {args.mode}")
    d = report.to_dict()
    rows = [(k, d[k]) for k in ("instance", "kind", "mode", "direction", "checked",
                                "unconverged", "success")]
    rows += [("counterexample", c) for c in d["counterexamples"]]
    return rows, 0 if report.success else 1


def cmd_oracle(args):
    if args.what == "local-optima":
        g = _load(args.instance, "graph")
        opts = sorted(brute_local_optima(g))
        return [("count", len(opts))] + [("cut", c) for c in opts], 0
    game = _load(args.instance, "game")
    eqs = sorted(brute_pne(game))
    rows = [("count", len(eqs))]
    rows += [("profile", " | ".join(" ".join(str(k) for k in p) for p in prof)) for prof in eqs]
    return rows, 0


def cmd_gadget_check(args):
    names = sorted(LEMMAS) if args.lemma == "all" else [args.lemma]
    for name in names:
        if name not in LEMMAS:
            raise UsageError(f"unknown lemma {name!r}; expected one of {', '.join(sorted(LEMMAS))}")
    rows, ok = [], True
    for name in names:
        res = run_gadget_lemma(name, N=args.scale, mode=args.mode)
        ok = ok and res.passed
        rows.append((name, f"{'pass' if res.passed else 'FAIL'} cases={res.cases} "
                           f"modes={','.join(sorted(res.modes))} free={res.max_free}"))
    return rows, 0 if ok else 1


def _bench_one(seed, n, eps):
    rng = random.Random(seed)
    weights = [rng.randrange(1, 2 ** 32) for _ in range(n)]
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.3]
    g = VertexWeightedGraph(tuple(weights), tuple(edges))
    t0 = time.perf_counter_ns()
    res = run_bridgegaps(g, eps)
    ms = (time.perf_counter_ns() - t0) // 10 ** 6
    return seed, res.flips, res.verified, ms


def cmd_bench(args):
    seeds = [args.seed + k for k in range(args.instances)]
    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        results = list(pool.map(lambda s: _bench_one(s, args.n, args.eps), seeds))
    rows = [(f"seed {s}", f"flips={f} verified={'yes' if v else 'no'} ms={ms}")
            for s, f, v, ms in results]
    ok = all(v for _, _, v, _ in results)
    return rows, 0 if ok else 1


# ---------------------------------------------------------------- parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "tsv"), default=argparse.SUPPRESS)
    p = _Parser(prog="plsforge", description="Local-search games, reductions and oracles.")
    p.add_argument("--format", choices=("text", "tsv"), default="text")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("solve-nmc", parents=[common], help="improving flips to a local optimum")
    s.add_argument("graph")
    s.add_argument("--schedule", choices=("max-gain", "fifo"), default="max-gain")
    s.add_argument("--start")
    s.add_argument("--max-steps", type=int)
    s.set_defaults(func=cmd_solve_nmc)

    s = sub.add_parser("bridgegaps", parents=[common], help="approximate equilibrium")
    s.add_argument("graph")
    s.add_argument("--eps", type=_fraction, required=True)
    s.add_argument("--delta-variant", action="store_true")
    s.add_argument("--schedule", choices=("first", "max-gain"), default="first")
    s.set_defaults(func=cmd_bridgegaps)

    s = sub.add_parser("reduce", parents=[common], help="compile an instance")
    s.add_argument("kind", choices=REDUCTIONS)
    s.add_argument("input")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--scale", type=int)
    s.add_argument("--roles")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("mapback", parents=[common], help="map a target solution back")
    s.add_argument("kind", choices=REDUCTIONS)
    s.add_argument("roles")
    s.add_argument("solution")
    s.set_defaults(func=cmd_mapback)

    s = sub.add_parser("dynamics", parents=[common], help="best-response or flip dynamics")
    s.add_argument("instance")
    s.add_argument("--schedule", choices=("round-robin", "max-gain", "seeded-random", "fifo"))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--start")
    s.add_argument("--max-steps", type=int)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_dynamics)

    s = sub.add_parser("verify", parents=[common], help="check a compiled reduction")
    s.add_argument("kind", choices=REDUCTIONS)
    s.add_argument("source")
    s.add_argument("compiled")
    s.add_argument("--mode", choices=("embed-check", "dynamics-sample", "exhaustive"),
                   required=True)
    s.add_argument("--roles")
    s.add_argument("--scale", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--runs", type=int, default=20)
    s.add_argument("--max-steps", type=int)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("oracle", parents=[common], help="brute-force enumeration")
    s.add_argument("what", choices=("local-optima", "pne"))
    s.add_argument("instance")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("gadget-check", parents=[common], help="check a gadget lemma")
    s.add_argument("lemma", help="lemma id or 'all'")
    s.add_argument("--scale", type=int, required=True)
    s.add_argument("--mode", choices=("auto", "exhaustive", "dominance"), default="auto")
    s.set_defaults(func=cmd_gadget_check)

    s = sub.add_parser("bench", parents=[common], help="timed BridgeGaps runs")
    s.add_argument("--instances", type=int, default=8)
    s.add_argument("--n", type=int, default=20)
    s.add_argument("--eps", type=_fraction, default=Fraction(1, 2))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threads", type=int, default=4)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("plsforge: a subcommand is required (see --help)")
        rows, code = args.func(args)
    except SystemExit as exc:          # --help
        return 0 if exc.code in (0, None) else 2
    except UsageError as exc:
        err.write(f"{exc}\n")
        return 2
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return 2
    except (PlsForgeError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return 2
    _print(rows, args.format, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
