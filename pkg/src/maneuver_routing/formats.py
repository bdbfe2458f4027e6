"""Line-oriented text formats for networks, maneuvers, results and traces.

Network file::

    # comment
    vertex x                      (optional; declares an isolated vertex)
    edge <tail> <head> <weight> [<label>]

Maneuver file::

    maneuver <penalty|inf> <v0> [<v1> ... <vk>]
    maneuver* <penalty|inf> <v0> <edge-label1> ... <edge-labelk>

Result file::

    distance <value|inf>
    walk <v0> [<label>] <v1> ...
    stat <name> <value>
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .engine import QueryResult, QueryStats, TraceRow, format_trace
from .maneuvers import INF, ContextAutomaton, Maneuver, ManeuverSet, format_value
from .network import Graph, InputError, RoadNetwork, Walk

NAME = re.compile(r"[A-Za-z0-9_]+\Z")
DECIMAL = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\Z")


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}: {self.message}"


class ParseError(InputError):
    def __init__(self, diagnostics: list[Diagnostic]) -> None:
        super().__init__("\n".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


def _tokens(text: str):
    """Yield (line number, [(column, token), ...]) for non-blank, non-comment lines."""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        toks = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]
        if toks:
            yield lineno, toks


def parse_number(token: str, *, allow_inf: bool) -> float:
    if allow_inf and token == "inf":
        return INF
    if not DECIMAL.match(token):
        raise ValueError(f"not a decimal number: {token!r}")
    return float(token)


def parse_network(text: str) -> Graph:
    g = Graph()
    diags: list[Diagnostic] = []
    for lineno, toks in _tokens(text):
        col, kw = toks[0]
        if kw == "vertex":
            if len(toks) != 2:
                diags.append(Diagnostic(lineno, col, "expected: vertex <name>"))
            elif not NAME.match(toks[1][1]):
                diags.append(Diagnostic(lineno, toks[1][0], f"bad vertex name {toks[1][1]!r}"))
            else:
                g.add_vertex(toks[1][1])
            continue
        if kw != "edge":
            diags.append(Diagnostic(lineno, col, f"unknown directive {kw!r}"))
            continue
        if len(toks) not in (4, 5):
            diags.append(Diagnostic(lineno, col, "expected: edge <tail> <head> <weight> [<label>]"))
            continue
        bad = [(c, t) for c, t in toks[1:3] + toks[4:] if not NAME.match(t)]
        if bad:
            diags.append(Diagnostic(lineno, bad[0][0], f"bad name {bad[0][1]!r}"))
            continue
        wcol, wtok = toks[3]
        try:
            w = parse_number(wtok, allow_inf=False)
        except ValueError as exc:
            diags.append(Diagnostic(lineno, wcol, str(exc)))
            continue
        if w < 0:
            diags.append(Diagnostic(lineno, wcol, f"negative edge weight {wtok}"))
            continue
        label = toks[4][1] if len(toks) == 5 else None
        try:
            g.add_edge(toks[1][1], toks[2][1], w, label)
        except InputError as exc:
            diags.append(Diagnostic(lineno, toks[4][0] if label else wcol, str(exc)))
    for name in g.labels:
        if name in g.index:
            diags.append(Diagnostic(0, 0, f"edge label {name!r} collides with a vertex name"))
    if diags:
        raise ParseError(diags)
    return g


def parse_maneuvers(text: str, g: Graph) -> ManeuverSet:
    items: list[Maneuver] = []
    diags: list[Diagnostic] = []
    for lineno, toks in _tokens(text):
        col, kw = toks[0]
        if kw not in ("maneuver", "maneuver*"):
            diags.append(Diagnostic(lineno, col, f"unknown directive {kw!r}"))
            continue
        if len(toks) < 3:
            diags.append(Diagnostic(lineno, col, f"expected: {kw} <penalty|inf> <v0> ..."))
            continue
        pcol, ptok = toks[1]
        try:
            penalty = parse_number(ptok, allow_inf=True)
        except ValueError as exc:
            diags.append(Diagnostic(lineno, pcol, str(exc)))
            continue
        names = [t for _, t in toks[2:]]
        try:
            if kw == "maneuver":
                walk = g.walk_from_names(names)
            else:
                walk = g.walk_from_labels(names[0], names[1:])
        except InputError as exc:
            diags.append(Diagnostic(lineno, toks[2][0], str(exc)))
            continue
        items.append(Maneuver(len(items) + 1, walk, penalty, f"M{len(items) + 1}"))
    if diags:
        raise ParseError(diags)
    return ManeuverSet(items)


def load_network(network_text: str, maneuver_text: str) -> RoadNetwork:
    g = parse_network(network_text)
    return RoadNetwork(g, parse_maneuvers(maneuver_text, g))


def serialize_network(g: Graph) -> str:
    # Vertex handles follow first appearance, so declare them all whenever
    # the edge list alone would number them differently.
    seen: dict[int, None] = {}
    for e in g.edges:
        seen.setdefault(e.tail)
        seen.setdefault(e.head)
    lines = []
    if list(seen) != list(range(g.vertex_count)):
        lines = [f"vertex {name}" for name in g.names]
    for e in g.edges:
        label = f" {e.label}" if e.label else ""
        lines.append(f"edge {g.names[e.tail]} {g.names[e.head]} {format_value(e.weight)}{label}")
    return "\n".join(lines) + "\n"


def _unambiguous(g: Graph, p: Walk) -> bool:
    return all(len(g.edges_between(g.edges[e].tail, g.edges[e].head)) == 1 for e in p.edges)


def serialize_maneuvers(g: Graph, ms: ManeuverSet) -> str:
    lines = []
    for m in ms:
        pen = format_value(m.penalty)
        if _unambiguous(g, m.walk):
            body = " ".join(g.names[v] for v in m.walk.vertices)
            lines.append(f"maneuver {pen} {body}")
        else:
            if any(g.edges[e].label is None for e in m.walk.edges):
                raise InputError(f"maneuver {m.label} crosses unlabeled parallel edges")
            body = " ".join([g.names[m.walk.start]] + [g.edges[e].label for e in m.walk.edges])
            lines.append(f"maneuver* {pen} {body}")
    return "\n".join(lines) + ("\n" if lines else "")


def serialize_walk(g: Graph, p: Walk) -> str:
    toks = [g.names[p.start]]
    for e in p.edges:
        if g.edges[e].label:
            toks.append(g.edges[e].label)
        toks.append(g.names[g.edges[e].head])
    return " ".join(toks)


def parse_walk(g: Graph, tokens: list[str]) -> Walk:
    if not tokens:
        raise InputError("empty walk")
    cur = g.vertex(tokens[0])
    edges: list[int] = []
    i = 1
    while i < len(tokens):
        tok = tokens[i]
        eid = g.labels.get(tok)
        if eid is not None and g.edges[eid].tail == cur:
            if i + 1 >= len(tokens) or g.vertex(tokens[i + 1]) != g.edges[eid].head:
                raise InputError(f"edge {tok} must be followed by its head vertex")
            i += 2
        else:
            nxt = g.vertex(tok)
            between = [e for e in g.edges_between(cur, nxt) if e.label is None]
            if len(between) != 1:
                raise InputError(f"cannot resolve step {g.names[cur]} -> {tok}")
            eid = between[0].id
            i += 1
        edges.append(eid)
        cur = g.edges[eid].head
    return g.walk(g.vertex(tokens[0]), edges)


def serialize_result(g: Graph, r: QueryResult) -> str:
    lines = [f"distance {format_value(r.distance)}"]
    if r.walk is not None:
        lines.append(f"walk {serialize_walk(g, r.walk)}")
    if r.best_effort:
        lines.append("mode best-effort")
    for name, value in r.stats.as_dict().items():
        lines.append(f"stat {name} {value}")
    return "\n".join(lines) + "\n"


def parse_result(text: str, g: Graph) -> QueryResult:
    distance: float | None = None
    walk = None
    best_effort = False
    stats = QueryStats()
    known = set(stats.as_dict())
    diags: list[Diagnostic] = []
    for lineno, toks in _tokens(text):
        kw = toks[0][1]
        args = [t for _, t in toks[1:]]
        try:
            if kw == "distance" and len(args) == 1:
                distance = parse_number(args[0], allow_inf=True)
            elif kw == "walk":
                walk = parse_walk(g, args)
            elif kw == "mode" and args == ["best-effort"]:
                best_effort = True
            elif kw == "stat" and len(args) == 2 and args[0] in known:
                setattr(stats, args[0], int(args[1]))
            else:
                raise InputError(f"unrecognised line {' '.join(t for _, t in toks)!r}")
        except (InputError, ValueError) as exc:
            diags.append(Diagnostic(lineno, toks[0][0], str(exc)))
    if distance is None and not diags:
        diags.append(Diagnostic(0, 0, "missing distance line"))
    if diags:
        raise ParseError(diags)
    return QueryResult(distance, walk, stats, best_effort)


def serialize_trace(aut: ContextAutomaton, rows: list[TraceRow]) -> str:
    return format_trace(aut, rows)


FIXTURES = ("net_a", "net_b", "net_b_rule_i", "net_b_rule_ii", "net_b_rule_iii")


def fixture_text(name: str) -> tuple[str, str]:
    """Network and maneuver file contents of a bundled fixture."""
    base = resources.files("maneuver_routing") / "fixtures"
    return (
        (base / f"{name}.network").read_text(encoding="utf-8"),
        (base / f"{name}.maneuvers").read_text(encoding="utf-8"),
    )


def load_fixture(name: str) -> RoadNetwork:
    return load_network(*fixture_text(name))
