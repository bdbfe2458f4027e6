"""Directed multigraphs, walks over them, and the road-network container.

Walks are stored as a start vertex plus a sequence of edge ids. Vertex
sequences alone are ambiguous once parallel edges exist, so every walk
carries both its vertex chain and its edge chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

if TYPE_CHECKING:
    from .maneuvers import ContextAutomaton, ManeuverSet, PropernessReport


class InputError(ValueError):
    """Raised for malformed graphs, walks, or queries."""


@dataclass(frozen=True)
class Edge:
    id: int
    tail: int
    head: int
    weight: float
    label: str | None = None


class Graph:
    """Directed multigraph with dense vertex and edge handles.

    Vertices and edges are appended through :meth:`add_vertex` and
    :meth:`add_edge`; once handed to a :class:`RoadNetwork` the graph is
    treated as frozen. Out-edges are kept in insertion order, which fixes the
    relaxation order of every search and therefore its trace.
    """

    def __init__(self) -> None:
        self.names: list[str] = []
        self.index: dict[str, int] = {}
        self.edges: list[Edge] = []
        self.labels: dict[str, int] = {}
        self._out: list[list[int]] = []

    @property
    def vertex_count(self) -> int:
        return len(self.names)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def add_vertex(self, name: str) -> int:
        if name in self.index:
            return self.index[name]
        self.index[name] = len(self.names)
        self.names.append(name)
        self._out.append([])
        return self.index[name]

    def add_edge(
        self, tail: str | int, head: str | int, weight: float, label: str | None = None
    ) -> Edge:
        u = self.add_vertex(tail) if isinstance(tail, str) else self._check_vertex(tail)
        v = self.add_vertex(head) if isinstance(head, str) else self._check_vertex(head)
        weight = float(weight)
        if not math.isfinite(weight) or weight < 0:
            raise InputError(f"edge weight must be finite and non-negative, got {weight!r}")
        if label is not None and label in self.labels:
            raise InputError(f"duplicate edge label {label!r}")
        edge = Edge(len(self.edges), u, v, weight, label)
        self.edges.append(edge)
        self._out[u].append(edge.id)
        if label is not None:
            self.labels[label] = edge.id
        return edge

    def _check_vertex(self, v: int) -> int:
        if not 0 <= v < len(self.names):
            raise InputError(f"unknown vertex handle {v}")
        return v

    def vertex(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise InputError(f"unknown vertex {name!r}") from None

    def out_edges(self, v: int) -> list[Edge]:
        self._check_vertex(v)
        return [self.edges[e] for e in self._out[v]]

    def out_edge_ids(self, v: int) -> list[int]:
        return self._out[v]

    def edges_between(self, u: int, v: int) -> list[Edge]:
        return [self.edges[e] for e in self._out[u] if self.edges[e].head == v]

    def edge_name(self, e: int) -> str:
        edge = self.edges[e]
        return edge.label or f"{self.names[edge.tail]}{self.names[edge.head]}"

    # Walk construction -----------------------------------------------------

    def walk(self, start: int, edges: Iterable[int] = ()) -> Walk:
        """Build a walk from a start vertex and edge ids, checking incidence."""
        self._check_vertex(start)
        vertices = [start]
        edge_ids = tuple(edges)
        for e in edge_ids:
            if not 0 <= e < len(self.edges):
                raise InputError(f"unknown edge id {e}")
            edge = self.edges[e]
            if edge.tail != vertices[-1]:
                raise InputError(
                    f"edge {self.edge_name(e)} does not leave {self.names[vertices[-1]]}"
                )
            vertices.append(edge.head)
        return Walk(tuple(vertices), edge_ids)

    def walk_from_names(self, names: Sequence[str]) -> Walk:
        """Build a walk from vertex names; fails when parallel edges make it ambiguous."""
        if not names:
            raise InputError("a walk needs at least one vertex")
        verts = [self.vertex(n) for n in names]
        edges = []
        for u, v in zip(verts, verts[1:]):
            between = self.edges_between(u, v)
            if not between:
                raise InputError(f"no edge {self.names[u]} -> {self.names[v]}")
            if len(between) > 1:
                raise InputError(
                    f"ambiguous step {self.names[u]} -> {self.names[v]}: "
                    f"{len(between)} parallel edges"
                )
            edges.append(between[0].id)
        return self.walk(verts[0], edges)

    def walk_from_labels(self, start: str, labels: Sequence[str]) -> Walk:
        edges = []
        for label in labels:
            if label not in self.labels:
                raise InputError(f"unknown edge label {label!r}")
            edges.append(self.labels[label])
        return self.walk(self.vertex(start), edges)

    def format_walk(self, p: Walk) -> str:
        return "(" + ",".join(self.names[v] for v in p.vertices) + ")"


@dataclass(frozen=True)
class Walk:
    """Alternating vertex/edge sequence; ``vertices`` has one more entry than ``edges``."""

    vertices: tuple[int, ...]
    edges: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if len(self.vertices) != len(self.edges) + 1:
            raise InputError("a walk has exactly one more vertex than edges")

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def is_trivial(self) -> bool:
        return not self.edges

    def prefix(self, i: int) -> Walk:
        return Walk(self.vertices[: i + 1], self.edges[:i])

    def suffix(self, i: int) -> Walk:
        """The walk starting at index ``i`` (0 gives the whole walk)."""
        return Walk(self.vertices[i:], self.edges[i:])

    def reversed_in(self, rev_edge: Sequence[int]) -> Walk:
        return Walk(self.vertices[::-1], tuple(rev_edge[e] for e in reversed(self.edges)))


def concat(p1: Walk, p2: Walk) -> Walk:
    if p1.end != p2.start:
        raise InputError("cannot concatenate: first walk does not end where the second starts")
    return Walk(p1.vertices + p2.vertices[1:], p1.edges + p2.edges)


def weight(p: Walk, g: Graph) -> float:
    return math.fsum(g.edges[e].weight for e in p.edges)


def prefixes(p: Walk, proper: bool = False) -> list[Walk]:
    stop = len(p) if proper else len(p) + 1
    return [p.prefix(i) for i in range(stop)]


def suffixes(p: Walk, proper: bool = False) -> list[Walk]:
    start = 1 if proper else 0
    return [p.suffix(i) for i in range(start, len(p) + 1)]


def occurrences(needle: Sequence[int], haystack: Sequence[int]) -> list[int]:
    """Start positions of ``needle`` as a contiguous run inside ``haystack``."""
    k = len(needle)
    needle = tuple(needle)
    return [i for i in range(len(haystack) - k + 1) if tuple(haystack[i : i + k]) == needle]


def is_subwalk(q: Walk, p: Walk) -> bool:
    if q.is_trivial:
        return q.start in p.vertices
    return bool(occurrences(q.edges, p.edges))


@dataclass
class RoadNetwork:
    """A graph with its maneuver set; the automaton is built lazily and cached."""

    graph: Graph
    maneuvers: ManeuverSet
    _automaton: ContextAutomaton | None = field(default=None, repr=False, compare=False)
    _report: PropernessReport | None = field(default=None, repr=False, compare=False)

    @property
    def automaton(self) -> ContextAutomaton:
        if self._automaton is None:
            from .maneuvers import build_automaton

            self._automaton = build_automaton(self.graph, self.maneuvers)
        return self._automaton

    @property
    def properness(self) -> PropernessReport:
        if self._report is None:
            from .maneuvers import check_proper

            self._report = check_proper(self)
        return self._report


def reverse_graph(g: Graph) -> Graph:
    rg = Graph()
    for name in g.names:
        rg.add_vertex(name)
    for e in g.edges:
        rg.add_edge(e.head, e.tail, e.weight, e.label)
    return rg


def reverse(net: RoadNetwork) -> RoadNetwork:
    """Reverse every edge and every maneuver walk, keeping weights and penalties.

    Edge ids and vertex handles are preserved, so edge ``i`` of the result is
    the reversal of edge ``i`` of ``net``.
    """
    from .maneuvers import Maneuver, ManeuverSet

    rg = reverse_graph(net.graph)
    ident = list(range(rg.edge_count))
    ms = ManeuverSet(
        Maneuver(m.id, m.walk.reversed_in(ident), m.penalty, m.name)
        for m in net.maneuvers
    )
    return RoadNetwork(rg, ms)
