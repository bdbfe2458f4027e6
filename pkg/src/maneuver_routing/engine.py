"""Maneuver-aware Dijkstra over (vertex, context) pairs.

Labels live on pairs ``(v, X)`` where ``X`` is an automaton context ending at
``v``. The frontier is a binary heap with lazy deletion ordered by
``(distance, context length, insertion sequence)``; equal distances put
shorter contexts first, and any suffix of a context is strictly shorter, so
this total order refines the partial order the search needs.

Negative maneuvers of two or more edges are walked eagerly as soon as their
first edge is relaxed, so that the pairs they improve enter the heap before
anything that would be scanned in the wrong order.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

from .maneuvers import INF, ROOT, ContextAutomaton, Maneuver, format_value
from .network import InputError, RoadNetwork, Walk

Pair = tuple[int, int]


class ImproperNetworkError(ValueError):
    def __init__(self, report) -> None:
        super().__init__(report.format())
        self.report = report


class SearchError(RuntimeError):
    """Internal inconsistency in the search state."""


@dataclass
class QueryStats:
    pairs_scanned: int = 0
    relaxations: int = 0
    heap_pops: int = 0
    c_m: int = 0
    pair_bound: int = 0
    # Updates that would have lowered an already scanned pair; always 0 on proper networks.
    settled_conflicts: int = 0

    def as_dict(self) -> dict[str, int]:
        return dict(self.__dict__)


@dataclass
class QueryResult:
    distance: float
    walk: Walk | None
    stats: QueryStats = field(default_factory=QueryStats)
    best_effort: bool = False


@dataclass
class TraceRow:
    step: int
    pair: Pair
    distance: float
    frontier: list[tuple[Pair, float]]


def pair_bound(net: RoadNetwork) -> int:
    return net.graph.vertex_count + sum(
        len(m.walk) - 1 for m in net.maneuvers if len(m.walk) >= 1
    )


class Search:
    """Mutable state of one query. Not shared between queries."""

    def __init__(self, net: RoadNetwork, source: int) -> None:
        self.net = net
        self.graph = net.graph
        self.aut: ContextAutomaton = net.automaton
        self.d: dict[Pair, float] = {}
        self.pred: dict[Pair, tuple[Pair, int]] = {}
        self.scanned: set[Pair] = set()
        self.heap: list[tuple[float, int, int, Pair]] = []
        self.seq = itertools.count()
        self.source = source
        self.stats = QueryStats(c_m=net.maneuvers.c_m, pair_bound=pair_bound(net))
        # Pairs first reached during eager negative-maneuver processing.
        self.eager: set[Pair] = set()

        start = (source, ROOT)
        d0 = 0.0 + net.maneuvers.zero_edge_penalty(source)
        if d0 < INF:
            self.d[start] = d0
            self._push(start, d0)

    def _push(self, pair: Pair, dist: float) -> None:
        heapq.heappush(self.heap, (dist, self.aut.depth[pair[1]], next(self.seq), pair))

    def pop_min(self) -> Pair | None:
        """Remove and return the least live pair, or None once the heap is exhausted."""
        while self.heap:
            dist, _, _, pair = heapq.heappop(self.heap)
            self.stats.heap_pops += 1
            if pair in self.scanned or dist > self.d.get(pair, INF):
                continue
            return pair
        return None

    def relax(self, u: int, x: int, e: int) -> Pair:
        """Relax edge ``e`` out of pair ``(u, x)``; returns the arrival pair."""
        self.stats.relaxations += 1
        nxt, penalty, _ = self.aut.step(x, e)
        target = (self.graph.edges[e].head, nxt)
        cand = self.d.get((u, x), INF) + self.graph.edges[e].weight + penalty
        if cand < self.d.get(target, INF):
            if target in self.scanned:
                self.stats.settled_conflicts += 1
                return target
            self.d[target] = cand
            self.pred[target] = ((u, x), e)
            self._push(target, cand)
        return target

    def process_negative(self, x: int, m: Maneuver) -> None:
        """Walk negative maneuver ``m`` edge by edge after its first edge left context ``x``.

        Stops at the end of ``m``, when an arrival estimate is infinite (a
        prohibited maneuver ended there), or when an entered restricted
        maneuver forces a different next edge.
        """
        edges = m.walk.edges
        verts = m.walk.vertices
        ctx, _, _ = self.aut.step(x, edges[0])
        i = 1
        while True:
            here = (verts[i], ctx)
            if self.d.get(here, INF) == INF:
                return
            if i == len(edges):
                return
            forced = self.aut.forced[ctx]
            if forced and edges[i] not in forced:
                return
            arrival = self.relax(verts[i], ctx, edges[i])
            if arrival not in self.scanned:
                self.eager.add(arrival)
            ctx = arrival[1]
            i += 1

    def scan(self, pair: Pair) -> None:
        u, x = pair
        forced = self.aut.forced[x]
        out = self.graph.out_edge_ids(u)
        for e in out:
            if forced and e not in forced:
                continue
            self.relax(u, x, e)
            for m in self.net.maneuvers.negative_multi_edge(e):
                self.process_negative(x, m)
        self.scanned.add(pair)
        self.stats.pairs_scanned += 1

    def live_frontier(self) -> list[tuple[Pair, float]]:
        seen: dict[Pair, tuple] = {}
        for dist, depth, seq, pair in self.heap:
            if pair in self.scanned or dist > self.d.get(pair, INF):
                continue
            key = (dist, depth, seq)
            if pair not in seen or key < seen[pair]:
                seen[pair] = key
        return [(p, k[0]) for p, k in sorted(seen.items(), key=lambda kv: kv[1])]

    def construct_walk(self, end: Pair) -> Walk:
        if self.d.get(end, INF) == INF:
            raise SearchError("no finite label to reconstruct a walk from")
        edges: list[int] = []
        pair = end
        guard = len(self.d) + 1
        while pair in self.pred:
            pair, e = self.pred[pair]
            edges.append(e)
            guard -= 1
            if guard < 0:
                raise SearchError("predecessor chain does not terminate")
        if pair != (self.source, ROOT):
            raise SearchError("predecessor chain does not reach the source")
        edges.reverse()
        return self.graph.walk(self.source, edges)


def _run(
    net: RoadNetwork, s: int, t: int | None, *, check: bool, trace: list[TraceRow] | None
) -> tuple[QueryResult, Search]:
    g = net.graph
    for v in (s, t):
        if v is not None and not 0 <= v < g.vertex_count:
            raise InputError(f"unknown vertex handle {v}")
    report = net.properness
    if check and not report.proper:
        raise ImproperNetworkError(report)
    best_effort = not report.proper
    search = Search(net, s)
    reached: Pair | None = None
    step = 0
    while reached is None:
        pair = search.pop_min()
        if pair is None:
            break
        search.scan(pair)
        step += 1
        if trace is not None:
            trace.append(TraceRow(step, pair, search.d[pair], search.live_frontier()))
        if pair[0] == t:
            reached = pair
    if reached is None:
        result = QueryResult(INF, None, search.stats, best_effort)
    else:
        result = QueryResult(
            search.d[reached], search.construct_walk(reached), search.stats, best_effort
        )
    return result, search


def settle_all(net: RoadNetwork, s: int, *, trace: list[TraceRow] | None = None) -> Search:
    """Run the search from ``s`` until the frontier is empty and return its state."""
    _, search = _run(net, s, None, check=False, trace=trace)
    return search


def shortest_valid_walk(
    net: RoadNetwork, s: int, t: int, *, skip_properness_check: bool = False
) -> QueryResult:
    """Optimal valid walk from ``s`` to ``t`` with respect to penalized weight.

    Refuses improper networks with :class:`ImproperNetworkError` unless
    ``skip_properness_check`` is set; the result is then marked best-effort.
    """
    result, _ = _run(net, s, t, check=not skip_properness_check, trace=None)
    return result


def scan_trace(
    net: RoadNetwork, s: int, t: int, *, skip_properness_check: bool = False
) -> tuple[list[TraceRow], QueryResult]:
    rows: list[TraceRow] = []
    result, _ = _run(net, s, t, check=not skip_properness_check, trace=rows)
    return rows, result


def format_pair(aut: ContextAutomaton, pair: Pair) -> str:
    return f"({aut.graph.names[pair[0]]},{aut.format(pair[1])})"


def format_trace(aut: ContextAutomaton, rows: list[TraceRow]) -> str:
    lines = []
    for row in rows:
        queue = "; ".join(f"{format_pair(aut, p)}={format_value(d)}" for p, d in row.frontier)
        lines.append(
            f"step {row.step} | scan {format_pair(aut, row.pair)} d={format_value(row.distance)}"
            f" | Q:{' ' + queue if queue else ''}"
        )
    return "\n".join(lines) + ("\n" if lines else "")
