"""Shortest valid walks on road networks with maneuvers (turn bans, delays, forced directions, shortcuts)."""

from .engine import QueryResult, QueryStats, scan_trace, shortest_valid_walk
from .formats import load_fixture, load_network
from .maneuvers import (
    Maneuver,
    ManeuverSet,
    build_automaton,
    check_proper,
    is_valid,
    penalized_weight,
)
from .network import Graph, RoadNetwork, Walk, reverse

__all__ = [
    "Graph",
    "Maneuver",
    "ManeuverSet",
    "QueryResult",
    "QueryStats",
    "RoadNetwork",
    "Walk",
    "build_automaton",
    "check_proper",
    "is_valid",
    "load_fixture",
    "load_network",
    "penalized_weight",
    "reverse",
    "scan_trace",
    "shortest_valid_walk",
]
