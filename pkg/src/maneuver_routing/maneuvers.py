"""Maneuvers, penalized weights, walk validity and the context automaton.

A maneuver is a walk carrying a penalty in ``R ∪ {+inf}``. The search keys
its labels on *contexts*: the longest proper maneuver prefix that is a
suffix of the walk traversed so far. Contexts are the states of a
multi-pattern prefix automaton (goto trie plus failure links) over the
edge-id alphabet, so stepping a context along one edge costs amortized O(1)
and reports every maneuver completed by that edge.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Literal

from .network import Graph, InputError, RoadNetwork, Walk, is_subwalk, weight

INF = math.inf
ROOT = 0

Kind = Literal["negative", "positive", "restricted", "prohibited"]
KINDS: tuple[Kind, ...] = ("negative", "positive", "restricted", "prohibited")


def check_penalty(value: float) -> float:
    value = float(value)
    if math.isnan(value) or value == -INF:
        raise InputError(f"penalty must be finite or +inf, got {value!r}")
    return value


def classify(penalty: float) -> Kind:
    if penalty == INF:
        return "prohibited"
    if penalty == 0:
        return "restricted"
    return "negative" if penalty < 0 else "positive"


@dataclass(frozen=True)
class Maneuver:
    id: int
    walk: Walk
    penalty: float
    name: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "penalty", check_penalty(self.penalty))

    @property
    def kind(self) -> Kind:
        return classify(self.penalty)

    @property
    def label(self) -> str:
        return self.name or f"M{self.id}"


class ManeuverSet:
    """Immutable collection of maneuvers with the lookup indices the search needs."""

    def __init__(self, maneuvers: Iterable[Maneuver] = ()) -> None:
        self._items: dict[int, Maneuver] = {}
        for m in maneuvers:
            if m.id in self._items:
                raise InputError(f"duplicate maneuver id {m.id}")
            self._items[m.id] = m
        self.by_vertex: dict[int, list[int]] = {}
        self.by_first_edge: dict[int, list[int]] = {}
        self.zero_edge: dict[int, list[int]] = {}
        for m in self._items.values():
            for v in dict.fromkeys(m.walk.vertices):
                self.by_vertex.setdefault(v, []).append(m.id)
            if m.walk.is_trivial:
                self.zero_edge.setdefault(m.walk.start, []).append(m.id)
            else:
                self.by_first_edge.setdefault(m.walk.edges[0], []).append(m.id)

    def __iter__(self) -> Iterator[Maneuver]:
        return iter(self._items.values())

    def __len__(self) -> int:
        return len(self._items)

    def __getitem__(self, mid: int) -> Maneuver:
        return self._items[mid]

    @property
    def c_m(self) -> int:
        """Largest number of maneuvers touching a single vertex."""
        return max((len(ids) for ids in self.by_vertex.values()), default=0)

    def zero_edge_penalty(self, v: int) -> float:
        return sum(self._items[i].penalty for i in self.zero_edge.get(v, ()))

    def without(self, mid: int) -> ManeuverSet:
        return ManeuverSet(m for m in self if m.id != mid)

    def replace(self, m: Maneuver) -> ManeuverSet:
        return ManeuverSet(m if old.id == m.id else old for old in self)

    def negative_multi_edge(self, e: int) -> list[Maneuver]:
        """Negative maneuvers of two or more edges whose first edge is ``e``."""
        return [
            self._items[i]
            for i in self.by_first_edge.get(e, ())
            if self._items[i].penalty < 0 and len(self._items[i].walk) > 1
        ]


@dataclass
class ContextAutomaton:
    """Prefix trie over edge ids with failure links.

    State 0 is the empty context. Every other state is one distinct prefix
    (at least one edge) of some maneuver walk. Full maneuver walks that are
    not also proper prefixes of another maneuver are kept as trie leaves so
    their outputs can be collected, but they are never returned as contexts.
    """

    graph: Graph
    maneuvers: ManeuverSet
    depth: list[int] = field(default_factory=lambda: [0])
    end_vertex: list[int | None] = field(default_factory=lambda: [None])
    walks: list[Walk | None] = field(default_factory=lambda: [None])
    goto: list[dict[int, int]] = field(default_factory=lambda: [{}])
    fail: list[int] = field(default_factory=lambda: [ROOT])
    own: list[list[int]] = field(default_factory=lambda: [[]])
    output: list[tuple[int, ...]] = field(default_factory=list)
    restricted_next: list[set[int]] = field(default_factory=lambda: [set()])
    forced: list[frozenset[int]] = field(default_factory=list)
    _steps: dict[tuple[int, int], tuple[int, float, tuple[int, ...]]] = field(
        default_factory=dict, repr=False
    )

    @property
    def state_count(self) -> int:
        return len(self.depth)

    def is_context(self, x: int) -> bool:
        return x == ROOT or bool(self.goto[x])

    def contexts(self) -> list[int]:
        return [x for x in range(self.state_count) if self.is_context(x)]

    def _insert(self, m: Maneuver) -> None:
        node = ROOT
        for k, e in enumerate(m.walk.edges):
            if m.penalty == 0 and k >= 1:
                self.restricted_next[node].add(e)
            nxt = self.goto[node].get(e)
            if nxt is None:
                nxt = len(self.depth)
                self.goto[node][e] = nxt
                self.depth.append(k + 1)
                self.end_vertex.append(m.walk.vertices[k + 1])
                self.walks.append(m.walk.prefix(k + 1))
                self.goto.append({})
                self.fail.append(ROOT)
                self.own.append([])
                self.restricted_next.append(set())
            node = nxt
        self.own[node].append(m.id)

    def _link(self) -> None:
        n = self.state_count
        output: list[tuple[int, ...]] = [()] * n
        forced: list[frozenset[int]] = [frozenset()] * n
        queue = deque([ROOT])
        while queue:
            x = queue.popleft()
            if x != ROOT:
                output[x] = tuple(self.own[x]) + output[self.fail[x]]
                forced[x] = frozenset(self.restricted_next[x]) | forced[self.fail[x]]
            for e, child in self.goto[x].items():
                if x == ROOT:
                    self.fail[child] = ROOT
                else:
                    f = self.fail[x]
                    while f != ROOT and e not in self.goto[f]:
                        f = self.fail[f]
                    self.fail[child] = self.goto[f].get(e, ROOT)
                queue.append(child)
        self.output = output
        self.forced = forced

    def step(self, x: int, e: int) -> tuple[int, float, tuple[int, ...]]:
        """Advance context ``x`` along edge ``e``.

        Returns the new context, the summed penalty of every maneuver that
        ends with this edge (including zero-edge maneuvers at its head), and
        those maneuvers' ids. Results are memoised per (state, edge).
        """
        key = (x, e)
        cached = self._steps.get(key)
        if cached is not None:
            return cached
        edge = self.graph.edges[e]
        if x != ROOT and self.end_vertex[x] != edge.tail:
            raise InputError(
                f"edge {self.graph.edge_name(e)} does not leave the end of context "
                f"{self.format(x)}"
            )
        s = x
        while s != ROOT and e not in self.goto[s]:
            s = self.fail[s]
        s = self.goto[s].get(e, ROOT)
        done = self.output[s] + tuple(self.maneuvers.zero_edge.get(edge.head, ()))
        while not self.is_context(s):
            s = self.fail[s]
        penalty = sum(self.maneuvers[i].penalty for i in done)
        result = (s, penalty, done)
        self._steps[key] = result
        return result

    def contexts_at(self, v: int) -> list[int]:
        return [ROOT] + [
            x for x in range(1, self.state_count) if self.end_vertex[x] == v and self.goto[x]
        ]

    def format(self, x: int) -> str:
        if x == ROOT:
            return "∅"
        return self.graph.format_walk(self.walks[x])


def build_automaton(g: Graph, ms: ManeuverSet) -> ContextAutomaton:
    aut = ContextAutomaton(g, ms)
    for m in ms:
        if g.walk(m.walk.start, m.walk.edges) != m.walk:
            raise InputError(f"maneuver {m.label} is not a walk of the graph")
        if m.walk.edges:
            aut._insert(m)
    aut._link()
    return aut


def contexts_at(aut: ContextAutomaton, v: int) -> list[int]:
    return aut.contexts_at(v)


def advance(aut: ContextAutomaton, x: int, e: int) -> tuple[int, list[Maneuver]]:
    nxt, _, done = aut.step(x, e)
    return nxt, [aut.maneuvers[i] for i in done]


def restricted_direction(aut: ContextAutomaton, v: int, x: int) -> frozenset[int]:
    """Edges out of ``v`` that continue a restricted maneuver entered in context ``x``."""
    if x != ROOT and aut.end_vertex[x] != v:
        raise InputError(f"context {aut.format(x)} does not end at {aut.graph.names[v]}")
    return aut.forced[x]


def penalized_weight(net: RoadNetwork, p: Walk) -> float:
    aut = net.automaton
    total = weight(p, net.graph) + net.maneuvers.zero_edge_penalty(p.start)
    x = ROOT
    for e in p.edges:
        x, penalty, _ = aut.step(x, e)
        total += penalty
    return total


def is_valid(net: RoadNetwork, p: Walk) -> bool:
    if penalized_weight(net, p) == INF:
        return False
    edges = p.edges
    n = len(edges)
    for m in net.maneuvers:
        if m.penalty != 0 or m.walk.is_trivial:
            continue
        r = m.walk.edges
        for i in range(n):
            if edges[i] != r[0]:
                continue
            j = 0
            while j < len(r) and i + j < n and edges[i + j] == r[j]:
                j += 1
            if j < len(r) and i + j < n:
                return False
    return True


def divergent(q1: Walk, q2: Walk) -> bool:
    def one_way(a: Walk, b: Walk) -> bool:
        return not a.is_trivial and a.edges[0] in b.edges and not is_subwalk(a, b)

    return one_way(q1, q2) or one_way(q2, q1)


def restricted_conflict(q1: Walk, q2: Walk, *, same: bool = False) -> bool:
    """True when an occurrence of one walk's first edge inside the other demands a different continuation.

    ``divergent`` compares walks as sets of subwalks and misses conflicts
    between two positions of a repeated edge. Both are needed to guarantee a
    unique forced edge out of every context.
    """
    for a, b in ((q1, q2), (q2, q1)):
        if not b.edges:
            continue
        for j in range(1 if same else 0, len(a)):
            if a.edges[j] != b.edges[0]:
                continue
            span = min(len(a) - j, len(b))
            if a.edges[j : j + span] != b.edges[:span]:
                return True
    return False


def overhangs(q1: Walk, q2: Walk, *, proper_only: bool = False) -> bool:
    """True when a nontrivial prefix of ``q2`` equals a suffix of ``q1``.

    ``proper_only`` restricts the overlap to prefixes shorter than ``q2``; it
    is used when comparing a maneuver with itself.
    """
    limit = min(len(q1), len(q2))
    if proper_only:
        limit = min(limit, len(q2) - 1)
    return any(q2.edges[:k] == q1.edges[len(q1) - k :] for k in range(1, limit + 1))


@dataclass(frozen=True)
class Violation:
    rule: Literal["i", "ii", "iii"]
    maneuvers: tuple[int, ...]
    detail: str


@dataclass
class PropernessReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def proper(self) -> bool:
        return not self.violations

    @property
    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def format(self) -> str:
        if self.proper:
            return "proper"
        lines = ["improper"]
        lines += [f"rule {v.rule}: {v.detail}" for v in self.violations]
        return "\n".join(lines)


def check_proper(net: RoadNetwork) -> PropernessReport:
    g = net.graph
    ms = list(net.maneuvers)
    report = PropernessReport()

    def show(m: Maneuver) -> str:
        return f"{m.label}={g.format_walk(m.walk)}"

    restricted = [m for m in ms if m.kind == "restricted"]
    for i, a in enumerate(restricted):
        if restricted_conflict(a.walk, a.walk, same=True):
            report.violations.append(
                Violation("i", (a.id,), f"restricted {show(a)} conflicts with its own repeat")
            )
        for b in restricted[i + 1 :]:
            if divergent(a.walk, b.walk):
                report.violations.append(
                    Violation("i", (a.id, b.id), f"restricted {show(a)} and {show(b)} are divergent")
                )
            elif restricted_conflict(a.walk, b.walk):
                report.violations.append(
                    Violation(
                        "i", (a.id, b.id), f"restricted {show(a)} and {show(b)} conflict at a repeat"
                    )
                )

    negative = [m for m in ms if m.kind == "negative"]
    for i, a in enumerate(negative):
        if overhangs(a.walk, a.walk, proper_only=True):
            report.violations.append(
                Violation("ii", (a.id,), f"negative {show(a)} overhangs itself")
            )
        for b in negative[i + 1 :]:
            if overhangs(a.walk, b.walk) or overhangs(b.walk, a.walk):
                report.violations.append(
                    Violation("ii", (a.id, b.id), f"negative {show(a)} and {show(b)} overhang")
                )

    for m in ms:
        # A non-negative penalty can only fail the bound when negatives exist.
        if m.penalty == INF or (m.penalty >= 0 and not negative):
            continue
        rest = penalized_weight(RoadNetwork(g, net.maneuvers.without(m.id)), m.walk)
        if m.penalty < -rest:
            report.violations.append(
                Violation(
                    "iii",
                    (m.id,),
                    f"penalty of {show(m)} is {format_value(m.penalty)}, "
                    f"below -{format_value(rest)}",
                )
            )
    return report


def format_value(x: float) -> str:
    """Shortest round-trip decimal; integral values drop the fractional part."""
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    if x == int(x) and abs(x) < 2**53:
        return str(int(x))
    return repr(float(x))
