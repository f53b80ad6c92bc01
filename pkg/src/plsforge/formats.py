"""Text formats for graphs, cuts, netlists, games, profiles, roles and reports.

Every file starts with a manifest line::

    #plsforge v1 kind=<kind> sha256=<16 hex digits> provenance=<free text>

The checksum covers the body (everything after the manifest line, with
trailing whitespace stripped from each line).  Blank lines and lines
starting with ``#`` inside the body are ignored.

Weights are written as a sum of terms, each an integer, a ``p/q`` rational,
``2^e`` or ``2^e*k``, joined by ``+`` or ``-`` without spaces.  Compiled
circuit instances carry weights with thousands of bits, and the exponent
form keeps them short.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .circuit import Circuit
from .congestion import CongestionGame, Edge, LinearLatency, Network, Player
from .errors import InvalidInstance, ParseError, PlsForgeError
from .games_core import EdgeWeightedGraph, VertexWeightedGraph, make_cut
from .reductions.common import SolutionMap

__all__ = [
    "FORMAT_VERSION", "Manifest", "format_weight", "parse_weight",
    "emit_graph", "parse_graph", "emit_cut", "parse_cut", "emit_netlist", "parse_netlist",
    "emit_game", "parse_game", "emit_profile", "parse_profile", "emit_roles", "parse_roles",
    "emit_report", "parse_report", "emit", "parse", "read_file", "write_file",
]

FORMAT_VERSION = 1
KINDS = ("graph", "cut", "netlist", "game", "profile", "roles", "report")
SMALL = 2 ** 64


# ---------------------------------------------------------------- weights

_TERM = re.compile(r"(?:2\^(\d+)(?:\*(\d+))?|(\d+)(?:/(\d+))?)")


def parse_weight(text, line=None, column=None):
    """Exact value of a weight literal such as ``12``, ``3/4`` or ``2^80*3-2^5``."""
    pos, total, sign = 0, Fraction(0), 1
    while True:
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            col = None if column is None else column + pos
            raise ParseError(f"bad weight literal {text!r}", line, col)
        e, k, num, den = m.groups()
        if e is not None:
            term = Fraction(int(k) if k else 1) * 2 ** int(e)
        else:
            if den is not None and int(den) == 0:
                raise ParseError(f"zero denominator in {text!r}", line, column)
            term = Fraction(int(num), int(den) if den else 1)
        total += sign * term
        pos = m.end()
        if pos == len(text):
            break
        if text[pos] not in "+-":
            col = None if column is None else column + pos
            raise ParseError(f"unexpected {text[pos]!r} in weight {text!r}", line, col)
        sign = 1 if text[pos] == "+" else -1
        pos += 1
    return total.numerator if total.denominator == 1 else total


def _power_term(k, e):
    tz = (k & -k).bit_length() - 1
    k, e = k >> tz, e + tz
    if e == 0:
        return str(k)
    return f"2^{e}" if k == 1 else f"2^{e}*{k}"


def format_weight(w):
    """Shortest-ish literal that :func:`parse_weight` reads back exactly."""
    w = Fraction(w)
    if w.denominator != 1:
        return f"{w.numerator}/{w.denominator}"
    w = w.numerator
    if w < 0:
        raise InvalidInstance("weights are nonnegative")
    if w < SMALL:
        return str(w)
    parts, sign = [], "+"
    while w:
        tz = (w & -w).bit_length() - 1
        if (w >> tz) < SMALL:
            parts.append((sign, _power_term(w >> tz, tz)))
            break
        e = w.bit_length() - 64
        top = w >> e
        below = w - (top << e)
        above = ((top + 1) << e) - w
        if above.bit_length() < below.bit_length():
            parts.append((sign, _power_term(top + 1, e)))
            w, sign = above, ("-" if sign == "+" else "+")
        else:
            parts.append((sign, _power_term(top, e)))
            w = below
    text = parts[0][1]
    for s, t in parts[1:]:
        text += s + t
    return text


# ---------------------------------------------------------------- manifest

@dataclass(frozen=True)
class Manifest:
    version: int
    kind: str
    checksum: str
    provenance: str = ""

    def line(self):
        out = f"#plsforge v{self.version} kind={self.kind} sha256={self.checksum}"
        return out + (f" provenance={self.provenance}" if self.provenance else "")


def _checksum(body: str) -> str:
    return hashlib.sha256(body.encode()).hexdigest()[:16]


def _normalize(lines):
    return "\n".join(ln.rstrip() for ln in lines).strip("\n")


def _wrap(kind, body_lines, provenance=""):
    body = _normalize(body_lines)
    provenance = " ".join(str(provenance).split())
    return Manifest(FORMAT_VERSION, kind, _checksum(body), provenance).line() + "\n" + body + "\n"


_MANIFEST = re.compile(r"^#plsforge\s+(\S+)\s+kind=(\S+)\s+sha256=([0-9a-f]+)(?:\s+provenance=(.*))?$")


def _unwrap(text, expect=None):
    """Split a file into its manifest and the numbered, non-comment body lines."""
    lines = text.splitlines()
    start = 0
    while start < len(lines) and not lines[start].strip():
        start += 1
    if start == len(lines):
        raise ParseError("empty file: expected a #plsforge manifest line", 1, 1)
    head = lines[start].strip()
    m = _MANIFEST.match(head)
    if not m:
        raise ParseError("missing or malformed #plsforge manifest line", start + 1, 1)
    version, kind, checksum, provenance = m.groups()
    if version != f"v{FORMAT_VERSION}":
        raise ParseError(f"unsupported format version {version!r}", start + 1, head.index(version) + 1)
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}", start + 1, head.index("kind=") + 6)
    if expect is not None and kind != expect:
        raise ParseError(f"expected a {expect} file, found kind={kind}", start + 1,
                         head.index("kind=") + 6)
    body_lines = lines[start + 1:]
    if _checksum(_normalize(body_lines)) != checksum:
        raise ParseError("checksum does not match the file body", start + 1, head.index("sha256=") + 8)
    numbered = []
    for k, ln in enumerate(body_lines, start=start + 2):
        if ln.strip() and not ln.lstrip().startswith("#"):
            numbered.append((k, ln))
    return Manifest(FORMAT_VERSION, kind, checksum, provenance or ""), numbered


def _tokens(line):
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]


def _int(tok, lineno, what="integer", low=0):
    col, text = tok
    if not re.fullmatch(r"\d+", text):
        raise ParseError(f"expected {what}, got {text!r}", lineno, col)
    v = int(text)
    if v < low:
        raise ParseError(f"{what} must be at least {low}", lineno, col)
    return v


def _expect(toks, n, lineno, line, shape):
    if len(toks) != n:
        col = toks[n][0] if len(toks) > n else len(line.rstrip()) + 1
        raise ParseError(f"expected `{shape}`", lineno, col)


def _header(numbered, words, shape):
    if not numbered:
        raise ParseError(f"missing `{shape}` header", None, None)
    lineno, line = numbered[0]
    toks = _tokens(line)
    if toks[0][1] not in words:
        raise ParseError(f"expected `{shape}` header", lineno, toks[0][0])
    return lineno, line, toks


def _instance(fn, lineno, col=1):
    try:
        return fn()
    except PlsForgeError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), lineno, col) from exc


# ---------------------------------------------------------------- graphs

def emit_graph(g, provenance=""):
    if isinstance(g, VertexWeightedGraph):
        lines = [f"nmc {g.n} {g.m}"]
        lines += [f"v {i} {format_weight(w)}" for i, w in enumerate(g.weights)]
        lines += [f"e {u} {v}" for u, v in g.edges]
    elif isinstance(g, EdgeWeightedGraph):
        lines = [f"mc {g.n} {g.m}"]
        lines += [f"e {u} {v} {format_weight(w)}" for u, v, w in g.edges]
    else:
        raise InvalidInstance(f"cannot write {type(g).__name__} as a graph")
    return _wrap("graph", lines, provenance)


def parse_graph(text):
    """Read a ``nmc`` or ``mc`` graph.

    ``mc`` files may list ``v`` lines (their weights are checked and
    ignored); ``nmc`` files must give every vertex exactly one.
    """
    _, numbered = _unwrap(text, "graph")
    hline, hl, toks = _header(numbered, ("nmc", "mc"), "nmc <n> <m>")
    _expect(toks, 3, hline, hl, f"{toks[0][1]} <n> <m>")
    kind = toks[0][1]
    n, m = _int(toks[1], hline, "vertex count"), _int(toks[2], hline, "edge count")
    weights = [None] * n
    edges = []
    for lineno, line in numbered[1:]:
        t = _tokens(line)
        if t[0][1] == "v":
            _expect(t, 3, lineno, line, "v <id> <weight>")
            i = _int(t[1], lineno, "vertex id")
            if i >= n:
                raise ParseError(f"vertex id {i} out of range", lineno, t[1][0])
            if weights[i] is not None:
                raise ParseError(f"vertex {i} listed twice", lineno, t[1][0])
            weights[i] = parse_weight(t[2][1], lineno, t[2][0])
        elif t[0][1] == "e":
            if kind == "nmc":
                _expect(t, 3, lineno, line, "e <u> <v>")
                edges.append((_int(t[1], lineno, "vertex id"), _int(t[2], lineno, "vertex id")))
            else:
                _expect(t, 4, lineno, line, "e <u> <v> <weight>")
                edges.append((_int(t[1], lineno, "vertex id"), _int(t[2], lineno, "vertex id"),
                               parse_weight(t[3][1], lineno, t[3][0])))
        else:
            raise ParseError(f"unknown record {t[0][1]!r}", lineno, t[0][0])
    if len(edges) != m:
        raise ParseError(f"header promises {m} edges, found {len(edges)}", hline, toks[2][0])
    if kind == "nmc":
        missing = [i for i, w in enumerate(weights) if w is None]
        if missing:
            raise ParseError(f"vertex {missing[0]} has no weight line", hline, toks[1][0])
        return _instance(lambda: VertexWeightedGraph(tuple(weights), tuple(edges)), hline)
    return _instance(lambda: EdgeWeightedGraph(n, tuple(edges)), hline)


# ---------------------------------------------------------------- cuts

def emit_cut(cut, provenance=""):
    return _wrap("cut", ["".join(str(b) for b in make_cut(cut))], provenance)


def parse_cut(text):
    _, numbered = _unwrap(text, "cut")
    if len(numbered) != 1:
        where = numbered[1][0] if len(numbered) > 1 else None
        raise ParseError("a cut file holds exactly one line of 0/1 labels", where, 1)
    lineno, line = numbered[0]
    body = line.strip()
    offset = line.index(body) + 1
    for k, ch in enumerate(body):
        if ch not in "01":
            raise ParseError(f"cut labels must be 0 or 1, got {ch!r}", lineno, offset + k)
    return tuple(int(ch) for ch in body)


# ---------------------------------------------------------------- netlists

def emit_netlist(c: Circuit, provenance=""):
    lines = [f"circuit {c.n} {len(c.outputs)}"]
    lines += [f"g {g} NOR {a} {b}" for g, a, b in c.gates]
    lines.append("outputs " + " ".join(f"g{o}" for o in c.outputs))
    if c.next_outputs is not None:
        lines.append("next-outputs " + " ".join(f"g{o}" for o in c.next_outputs))
    return _wrap("netlist", lines, provenance)


def _gate_refs(toks, lineno, count, what):
    if len(toks) - 1 != count:
        col = toks[-1][0] if toks else 1
        raise ParseError(f"expected {count} {what} references, found {len(toks) - 1}", lineno, col)
    out = []
    for col, ref in toks[1:]:
        if not re.fullmatch(r"g\d+", ref):
            raise ParseError(f"expected a gate reference g<id>, got {ref!r}", lineno, col)
        out.append(int(ref[1:]))
    return tuple(out)


def parse_netlist(text):
    _, numbered = _unwrap(text, "netlist")
    hline, hl, toks = _header(numbered, ("circuit",), "circuit <n> <m>")
    _expect(toks, 3, hline, hl, "circuit <n> <m>")
    n, m = _int(toks[1], hline, "input count", 1), _int(toks[2], hline, "output count")
    gates, outputs, nexts = [], None, None
    for lineno, line in numbered[1:]:
        t = _tokens(line)
        word = t[0][1]
        if word == "g":
            _expect(t, 5, lineno, line, "g <id> NOR <opA> <opB>")
            if t[2][1] != "NOR":
                raise ParseError(f"only NOR gates are supported, got {t[2][1]!r}", lineno, t[2][0])
            for col, op in (t[3], t[4]):
                if not re.fullmatch(r"[xg]\d+", op):
                    raise ParseError(f"bad operand {op!r}; expected x<i> or g<id>", lineno, col)
            gates.append((_int(t[1], lineno, "gate id"), t[3][1], t[4][1]))
        elif word == "outputs":
            if outputs is not None:
                raise ParseError("outputs listed twice", lineno, t[0][0])
            outputs = _gate_refs(t, lineno, m, "output")
        elif word == "next-outputs":
            if nexts is not None:
                raise ParseError("next-outputs listed twice", lineno, t[0][0])
            nexts = _gate_refs(t, lineno, n, "next-output")
        else:
            raise ParseError(f"unknown record {word!r}", lineno, t[0][0])
    if outputs is None:
        raise ParseError("missing `outputs` line", hline, 1)
    return _instance(lambda: Circuit(n, tuple(gates), outputs, nexts), hline)


# ---------------------------------------------------------------- games

def emit_game(game: CongestionGame, provenance=""):
    net = game.network
    lines = [f"wcg {game.num_players} {net.num_vertices} {len(net.edges)}"]
    lines += [f"p {format_weight(p.weight)} {p.origin} {p.destination}" for p in game.players]
    lines += [f"e {e.u} {e.v} {format_weight(e.latency.a)} {format_weight(e.latency.b)}"
              for e in net.edges]
    return _wrap("game", lines, provenance)


def parse_game(text):
    """Read a weighted congestion game; edges are numbered in file order."""
    _, numbered = _unwrap(text, "game")
    hline, hl, toks = _header(numbered, ("wcg",), "wcg <players> <vertices> <edges>")
    _expect(toks, 4, hline, hl, "wcg <players> <vertices> <edges>")
    k, nv, ne = (_int(t, hline) for t in toks[1:])
    players, edges = [], []
    for lineno, line in numbered[1:]:
        t = _tokens(line)
        if t[0][1] == "p":
            _expect(t, 4, lineno, line, "p <w> <o> <d>")
            w = parse_weight(t[1][1], lineno, t[1][0])
            o, d = _int(t[2], lineno, "vertex id"), _int(t[3], lineno, "vertex id")
            players.append(_instance(lambda: Player(w, o, d), lineno))
        elif t[0][1] == "e":
            _expect(t, 5, lineno, line, "e <u> <v> <a> <b>")
            u, v = _int(t[1], lineno, "vertex id"), _int(t[2], lineno, "vertex id")
            a = parse_weight(t[3][1], lineno, t[3][0])
            b = parse_weight(t[4][1], lineno, t[4][0])
            edges.append(_instance(lambda: Edge(u, v, LinearLatency(a, b)), lineno))
        else:
            raise ParseError(f"unknown record {t[0][1]!r}", lineno, t[0][0])
    if len(players) != k:
        raise ParseError(f"header promises {k} players, found {len(players)}", hline, toks[1][0])
    if len(edges) != ne:
        raise ParseError(f"header promises {ne} edges, found {len(edges)}", hline, toks[3][0])
    return _instance(lambda: CongestionGame(Network(nv, tuple(edges)), tuple(players)), hline)


# ---------------------------------------------------------------- profiles

def emit_profile(profile, provenance=""):
    """One line per player listing the edge ids of its path, in travel order."""
    lines = [f"profile {len(profile)}"]
    lines += [" ".join(str(k) for k in path) for path in profile]
    return _wrap("profile", lines, provenance)


def parse_profile(text):
    _, numbered = _unwrap(text, "profile")
    hline, hl, toks = _header(numbered, ("profile",), "profile <players>")
    _expect(toks, 2, hline, hl, "profile <players>")
    k = _int(toks[1], hline, "player count")
    paths = [tuple(_int(t, lineno, "edge id") for t in _tokens(line))
             for lineno, line in numbered[1:]]
    if len(paths) != k:
        raise ParseError(f"header promises {k} paths, found {len(paths)}", hline, toks[1][0])
    return tuple(paths)


# ---------------------------------------------------------------- roles and reports

def emit_roles(sm: SolutionMap, provenance=""):
    return _wrap("roles", [sm.to_json()], provenance)


def _json_body(numbered):
    if not numbered:
        raise ParseError("missing JSON body", None, None)
    text = "\n".join(line for _, line in numbered)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        lineno = numbered[0][0] + exc.lineno - 1
        raise ParseError(f"bad JSON: {exc.msg}", lineno, exc.colno) from exc


def parse_roles(text):
    _, numbered = _unwrap(text, "roles")
    obj = _json_body(numbered)
    if not isinstance(obj, dict) or "kind" not in obj or "data" not in obj:
        raise ParseError("roles body must be an object with kind and data", numbered[0][0], 1)
    return SolutionMap(obj["kind"], obj["data"])


def _plain(x):
    if isinstance(x, (tuple, list)):
        return [_plain(v) for v in x]
    if isinstance(x, Fraction):
        return format_weight(x) if x >= 0 else "-" + format_weight(-x)
    return x


def _tupled(x):
    return tuple(_tupled(v) for v in x) if isinstance(x, list) else x


def emit_report(report, provenance=""):
    obj = {
        "instance": report.instance_id,
        "kind": report.kind,
        "mode": report.mode,
        "direction": report.direction,
        "checked": report.checked,
        "unconverged": report.unconverged,
        "counterexamples": _plain(list(report.counterexamples)),
        "success": report.success,
    }
    return _wrap("report", [json.dumps(obj, sort_keys=True)], provenance)


def parse_report(text):
    from .oracle import VerificationReport
    _, numbered = _unwrap(text, "report")
    obj = _json_body(numbered)
    try:
        return VerificationReport(obj["instance"], obj["direction"], obj["checked"],
                                  [_tupled(c) for c in obj["counterexamples"]],
                                  obj["unconverged"], obj["kind"], obj["mode"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"report is missing field {exc}", numbered[0][0], 1) from exc


# ---------------------------------------------------------------- dispatch

_EMIT = {"graph": emit_graph, "cut": emit_cut, "netlist": emit_netlist, "game": emit_game,
         "profile": emit_profile, "roles": emit_roles, "report": emit_report}
_PARSE = {"graph": parse_graph, "cut": parse_cut, "netlist": parse_netlist, "game": parse_game,
          "profile": parse_profile, "roles": parse_roles, "report": parse_report}


def emit(kind, obj, provenance=""):
    if kind not in _EMIT:
        raise InvalidInstance(f"unknown kind {kind!r}")
    return _EMIT[kind](obj, provenance)


def parse(text, kind=None):
    """Parse any file; ``kind`` (when given) must match the manifest."""
    manifest, _ = _unwrap(text, kind)
    return manifest, _PARSE[manifest.kind](text)


def read_file(path, kind=None):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), kind)


def write_file(path, kind, obj, provenance=""):
    text = emit(kind, obj, provenance)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text
