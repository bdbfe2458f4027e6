"""Reference implementations used to check the search engine.

Nothing here touches the prefix automaton: contexts, completed maneuvers and
restricted-direction constraints are recomputed by brute force over edge
tuples. The state graph turns every maneuver into a plain (possibly
negative) arc weight so that a label-correcting search can serve as a
second route to the same distances, and the walk enumerator applies the
penalized-weight and validity definitions to literal walks.
"""

from __future__ import annotations

import heapq
import itertools
import math
import random
from collections import deque
from dataclasses import dataclass, field

from .maneuvers import (
    INF,
    KINDS,
    Maneuver,
    ManeuverSet,
    check_proper,
    classify,
    format_value,
    is_valid,
)
from .network import Graph, RoadNetwork, Walk, occurrences, reverse, weight

Edges = tuple[int, ...]
State = tuple[int, Edges]


class OracleError(RuntimeError):
    pass


class NegativeCycleError(OracleError):
    def __init__(self, cycle: list[State]) -> None:
        super().__init__(f"negative cycle through {len(cycle)} states")
        self.cycle = cycle


class EnumerationLimit(OracleError):
    """The instance is too large for exhaustive enumeration."""


class GenerationError(RuntimeError):
    pass


def brute_penalized_weight(net: RoadNetwork, p: Walk) -> float:
    """Walk weight plus every maneuver occurrence, found by direct scanning."""
    total = weight(p, net.graph)
    for m in net.maneuvers:
        if m.walk.is_trivial:
            hits = sum(1 for v in p.vertices if v == m.walk.start)
        else:
            hits = len(occurrences(m.walk.edges, p.edges))
        if hits:
            total += hits * m.penalty
    return total


class BruteModel:
    """Maneuver bookkeeping by explicit edge-tuple comparison."""

    def __init__(self, net: RoadNetwork) -> None:
        self.net = net
        self.graph = net.graph
        self.multi = [(m.walk.edges, m.penalty) for m in net.maneuvers if m.walk.edges]
        self.zero: dict[int, float] = {}
        for m in net.maneuvers:
            if m.walk.is_trivial:
                self.zero[m.walk.start] = self.zero.get(m.walk.start, 0.0) + m.penalty
        self.prefixes: set[Edges] = {
            edges[:k] for edges, _ in self.multi for k in range(1, len(edges))
        }
        self.restricted = [edges for edges, pen in self.multi if pen == 0 and len(edges) > 1]

    def context(self, seq: Edges) -> Edges:
        for k in range(len(seq), 0, -1):
            if seq[-k:] in self.prefixes:
                return seq[-k:]
        return ()

    def completion_penalty(self, seq: Edges) -> float:
        """Penalty of maneuvers ending exactly at the last edge of ``seq``."""
        total = 0.0
        for edges, pen in self.multi:
            if len(edges) <= len(seq) and seq[-len(edges) :] == edges:
                total += pen
        return total + self.zero.get(self.graph.edges[seq[-1]].head, 0.0)

    def required(self, ctx: Edges) -> set[int]:
        """Edges demanded next by restricted maneuvers entered and not yet finished."""
        need = set()
        for r in self.restricted:
            for k in range(1, len(r)):
                if len(ctx) >= k and ctx[-k:] == r[:k]:
                    need.add(r[k])
        return need

    def permitted(self, ctx: Edges, e: int) -> bool:
        need = self.required(ctx)
        return not need or need == {e}

    def step(self, ctx: Edges, e: int) -> tuple[Edges, float] | None:
        """Follow edge ``e`` from context ``ctx``; None when the move is not allowed."""
        if not self.permitted(ctx, e):
            return None
        seq = ctx + (e,)
        cost = self.graph.edges[e].weight + self.completion_penalty(seq)
        if cost == INF:
            return None
        return self.context(seq), cost

    def start_offset(self, s: int) -> float:
        return self.zero.get(s, 0.0)


@dataclass
class StateGraph:
    model: BruteModel
    states: list[State]
    index: dict[State, int]
    arcs: list[list[tuple[int, float, int]]] = field(default_factory=list)

    @property
    def state_count(self) -> int:
        return len(self.states)

    def arc(self, a: State, b: State) -> float | None:
        j = self.index[b]
        for target, w, _ in self.arcs[self.index[a]]:
            if target == j:
                return w
        return None


def build_state_graph(net: RoadNetwork) -> StateGraph:
    model = BruteModel(net)
    g = net.graph
    states: list[State] = [(v, ()) for v in range(g.vertex_count)]
    states += sorted((g.edges[x[-1]].head, x) for x in model.prefixes)
    index = {st: i for i, st in enumerate(states)}
    arcs: list[list[tuple[int, float, int]]] = []
    for v, ctx in states:
        out = []
        for e in g.out_edge_ids(v):
            moved = model.step(ctx, e)
            if moved is None:
                continue
            nctx, cost = moved
            out.append((index[(g.edges[e].head, nctx)], cost, e))
        arcs.append(out)
    return StateGraph(model, states, index, arcs)


def bellman_ford(sg: StateGraph, s: int) -> tuple[list[float], list[int | None]]:
    """Label-correcting distances from state (s, ∅) to every state.

    Raises :class:`NegativeCycleError` if a negative cycle is reachable.
    """
    n = sg.state_count
    dist = [INF] * n
    pred: list[int | None] = [None] * n
    offset = sg.model.start_offset(s)
    if offset == INF:
        return dist, pred
    src = sg.index[(s, ())]
    dist[src] = offset
    for _ in range(n):
        changed = False
        for i in range(n):
            if dist[i] == INF:
                continue
            for j, w, _ in sg.arcs[i]:
                if dist[i] + w < dist[j]:
                    dist[j] = dist[i] + w
                    pred[j] = i
                    changed = True
        if not changed:
            return dist, pred
    # Still relaxing after n rounds: walk predecessors to land on the cycle.
    for i in range(n):
        for j, w, _ in sg.arcs[i]:
            if dist[i] != INF and dist[i] + w < dist[j]:
                x = j
                for _ in range(n):
                    x = pred[x] if pred[x] is not None else x
                cycle, y = [x], pred[x]
                while y is not None and y != x and len(cycle) <= n:
                    cycle.append(y)
                    y = pred[y]
                raise NegativeCycleError([sg.states[k] for k in reversed(cycle)])
    return dist, pred


def bellman_ford_all(sg: StateGraph, s: int) -> list[float]:
    """Distance from ``s`` to every vertex (minimum over its contexts)."""
    dist, _ = bellman_ford(sg, s)
    best = [INF] * sg.model.graph.vertex_count
    for (v, _), d in zip(sg.states, dist):
        if d < best[v]:
            best[v] = d
    return best


def bellman_ford_distance(sg: StateGraph, s: int, t: int) -> float:
    return bellman_ford_all(sg, s)[t]


# Exhaustive enumeration ------------------------------------------------------

ENUMERATION_CAP = {"vertices": 12, "edges": 25, "maneuvers": 6, "maneuver_edges": 4}


def within_enumeration_cap(net: RoadNetwork) -> bool:
    g = net.graph
    return (
        g.vertex_count <= ENUMERATION_CAP["vertices"]
        and g.edge_count <= ENUMERATION_CAP["edges"]
        and len(net.maneuvers) <= ENUMERATION_CAP["maneuvers"]
        and all(len(m.walk) <= ENUMERATION_CAP["maneuver_edges"] for m in net.maneuvers)
    )


def enumerate_all(
    net: RoadNetwork,
    s: int,
    max_edges: int,
    *,
    prune_cycles: bool = True,
    node_limit: int = 2_000_000,
) -> dict[int, tuple[float, Walk]]:
    """Best valid walk from ``s`` to every reachable vertex by depth-first enumeration.

    Prefixes that are already invalid are cut, because no extension can
    repair them: an infinite penalty stays infinite and a restricted
    maneuver abandoned before the walk's end stays abandoned. With
    ``prune_cycles`` a walk never revisits a (vertex, context) state. Cutting
    such a cycle leaves the rest of the walk's penalties and constraints
    unchanged, so the optimum survives as long as no cycle has negative
    penalized weight.
    """
    model = BruteModel(net)
    g = net.graph
    best: dict[int, tuple[float, Edges]] = {}
    start = model.start_offset(s)
    if start == INF:
        return {}
    budget = [node_limit]
    path: list[int] = []
    on_path: set[State] = set()

    def visit(v: int, ctx: Edges, cost: float) -> None:
        budget[0] -= 1
        if budget[0] < 0:
            raise EnumerationLimit(f"more than {node_limit} walks explored")
        if v not in best or cost < best[v][0]:
            best[v] = (cost, tuple(path))
        if len(path) >= max_edges:
            return
        for e in g.out_edge_ids(v):
            moved = model.step(ctx, e)
            if moved is None:
                continue
            nctx, step_cost = moved
            nv = g.edges[e].head
            state = (nv, nctx)
            if prune_cycles and state in on_path:
                continue
            path.append(e)
            on_path.add(state)
            visit(nv, nctx, cost + step_cost)
            on_path.discard(state)
            path.pop()

    on_path.add((s, ()))
    visit(s, (), start)
    result = {}
    for v, (cost, edges) in best.items():
        walk = g.walk(s, edges)
        # Literal re-check of the witness against the definitions.
        if not is_valid(net, walk) or not math.isclose(
            brute_penalized_weight(net, walk), cost, abs_tol=1e-9
        ):
            raise OracleError(f"enumeration witness {g.format_walk(walk)} fails re-check")
        result[v] = (cost, walk)
    return result


def enumerate_optimum(
    net: RoadNetwork, s: int, t: int, max_edges: int, **kwargs
) -> tuple[float, Walk | None]:
    found = enumerate_all(net, s, max_edges, **kwargs).get(t)
    return found if found else (INF, None)


# Classical Dijkstra ----------------------------------------------------------


def classical_dijkstra(
    g: Graph, s: int, t: int, stats: dict | None = None
) -> tuple[float, Walk | None]:
    """Maneuver-blind shortest path with a lazy-deletion binary heap.

    Equal distances pop in insertion order, the same rule the engine uses,
    so pop counts on maneuver-free networks are directly comparable.
    """
    dist = {s: 0.0}
    pred: dict[int, int] = {}
    done: set[int] = set()
    seq = itertools.count()
    heap = [(0.0, next(seq), s)]
    pops = 0
    found = False
    while heap:
        d, _, u = heapq.heappop(heap)
        pops += 1
        if u in done or d > dist[u]:
            continue
        done.add(u)
        if u == t:
            found = True
            break
        for e in g.out_edge_ids(u):
            edge = g.edges[e]
            nd = d + edge.weight
            if nd < dist.get(edge.head, INF):
                dist[edge.head] = nd
                pred[edge.head] = e
                heapq.heappush(heap, (nd, next(seq), edge.head))
    if stats is not None:
        stats["heap_pops"] = pops
    if not found:
        return INF, None
    edges = []
    v = t
    while v != s:
        e = pred[v]
        edges.append(e)
        v = g.edges[e].tail
    return dist[t], g.walk(s, edges[::-1])


# Strong connectivity -----------------------------------------------------------


def _entry_walks(net: RoadNetwork, e: int) -> list[Edges]:
    """Walks ending with edge ``e``: every context ending with it, plus ``e`` alone."""
    model = BruteModel(net)
    found = {(e,)}
    found |= {x for x in model.prefixes if x[-1] == e}
    return sorted(found)


def _stream(model: BruteModel, start: int, ctx: Edges, edges: Edges) -> Edges | None:
    for e in edges:
        moved = model.step(ctx, e)
        if moved is None:
            return None
        ctx = moved[0]
    return ctx


def is_strongly_connected(net: RoadNetwork) -> bool:
    """Every context-entry walk can be extended into every context-exit walk.

    Starts are the contexts ``X·e`` of the network together with single edges
    ``e``; finishes are the reversals of contexts ``Y^R·f^R`` of the reversed
    network together with single edges ``f``.
    """
    g = net.graph
    if g.edge_count == 0:
        return True
    sg = build_state_graph(net)
    model = sg.model
    rnet = reverse(net)
    starts = [x for e in range(g.edge_count) for x in _entry_walks(net, e)]
    finishes = [y[::-1] for f in range(g.edge_count) for y in _entry_walks(rnet, f)]

    for x in starts:
        x0 = g.edges[x[0]].tail
        if model.start_offset(x0) == INF:
            return False
        ctx = _stream(model, x0, (), x)
        if ctx is None:
            return False
        begin = sg.index[(g.edges[x[-1]].head, ctx)]
        seen = {begin}
        queue = deque([begin])
        while queue:
            i = queue.popleft()
            for j, _, _ in sg.arcs[i]:
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
        for y in finishes:
            y0 = g.edges[y[0]].tail
            ok = any(
                sg.states[i][0] == y0 and _stream(model, y0, sg.states[i][1], y) is not None
                for i in seen
            )
            if not ok:
                for k in range(1, min(len(x), len(y)) + 1):
                    if x[-k:] == y[:k] and _stream(model, x0, (), x + y[k:]) is not None:
                        ok = True
                        break
            if not ok:
                return False
    return True


# Random proper networks -------------------------------------------------------


@dataclass
class GenParams:
    seed: int = 0
    vertices: tuple[int, int] = (3, 12)
    edges: tuple[int, int] = (3, 25)
    weights: tuple[float, float] = (0.5, 5.0)
    maneuvers: tuple[int, int] = (0, 6)
    maneuver_edges: tuple[int, int] = (0, 4)
    class_mix: dict[str, float] = field(
        default_factory=lambda: {k: 0.25 for k in KINDS}
    )
    zero_edge_prob: float = 0.1
    self_loop_prob: float = 0.05
    repair_budget: int = 100


def _half_steps(rng: random.Random, lo: float, hi: float) -> float:
    # Multiples of 0.5 keep every sum exact in binary floating point.
    return rng.randint(math.ceil(lo * 2), math.floor(hi * 2)) / 2


def random_proper_network(params: GenParams, log: list[str] | None = None) -> RoadNetwork:
    """Draw a random multigraph and maneuvers, then repair until proper.

    Deterministic for a given ``params``. Each decision is appended to
    ``log`` as ``gen <seed> <step> <choice>``.
    """
    rng = random.Random(params.seed)
    steps = 0

    def note(choice: str) -> None:
        nonlocal steps
        steps += 1
        if log is not None:
            log.append(f"gen {params.seed} {steps} {choice}")

    g = Graph()
    n = rng.randint(*params.vertices)
    for i in range(n):
        g.add_vertex(f"v{i}")
    m = rng.randint(max(params.edges[0], 0), max(params.edges[0], params.edges[1]))
    note(f"size vertices={n} edges={m}")
    order = list(range(n))
    rng.shuffle(order)
    backbone = list(zip(order, order[1:] + order[:1])) if n > 1 else []
    for i in range(m):
        if i < len(backbone) and rng.random() < 0.7:
            u, v = backbone[i]
        else:
            u = rng.randrange(n)
            v = rng.randrange(n)
            while v == u and n > 1 and rng.random() >= params.self_loop_prob:
                v = rng.randrange(n)
        w = _half_steps(rng, *params.weights)
        g.add_edge(u, v, w, f"e{i}")
        note(f"edge e{i} {g.names[u]} {g.names[v]} {format_value(w)}")

    kinds = list(params.class_mix)
    probs = [params.class_mix[k] for k in kinds]
    items: list[Maneuver] = []
    count = rng.randint(*params.maneuvers)
    for mid in range(1, count + 1):
        kind = rng.choices(kinds, probs)[0]
        if rng.random() < params.zero_edge_prob:
            length = 0
        else:
            length = rng.randint(max(1, params.maneuver_edges[0]), params.maneuver_edges[1])
        starts = [v for v in range(n) if g.out_edge_ids(v)] or list(range(n))
        v = rng.choice(starts)
        path = []
        for _ in range(length):
            out = g.out_edge_ids(v)
            if not out:
                break
            e = rng.choice(out)
            path.append(e)
            v = g.edges[e].head
        walk = g.walk(rng.choice(starts) if not path else g.edges[path[0]].tail, path)
        if kind == "prohibited":
            pen = INF
        elif kind == "restricted":
            pen = 0.0
        elif kind == "positive":
            pen = _half_steps(rng, 0.5, 10.0)
        else:
            pen = -_half_steps(rng, 0.5, max(0.5, weight(walk, g)))
        items.append(Maneuver(mid, walk, pen, f"M{mid}"))
        note(f"maneuver M{mid} {kind} {format_value(pen)} {g.format_walk(walk)}")

    net = RoadNetwork(g, ManeuverSet(items))
    for _ in range(params.repair_budget):
        report = check_proper(net)
        if report.proper:
            note("proper")
            return net
        v = report.violations[0]
        target = net.maneuvers[v.maneuvers[-1]]
        if v.rule == "iii":
            rest = brute_penalized_weight(
                RoadNetwork(g, net.maneuvers.without(target.id)), target.walk
            )
            pen = -rest
        else:
            pen = _half_steps(rng, 0.5, 10.0)
        fixed = Maneuver(target.id, target.walk, pen, target.name)
        note(
            f"repair-{v.rule} {target.label} {format_value(target.penalty)}->{format_value(pen)}"
            f" ({classify(pen)})"
        )
        net = RoadNetwork(g, net.maneuvers.replace(fixed))
    raise GenerationError(f"seed {params.seed}: not proper after {params.repair_budget} repairs")
