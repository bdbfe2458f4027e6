import pytest
from conftest import generated, vid
from hypothesis import given, settings
from hypothesis import strategies as st

from maneuver_routing.engine import QueryResult, QueryStats, shortest_valid_walk
from maneuver_routing.formats import (
    ParseError,
    load_network,
    parse_maneuvers,
    parse_network,
    parse_number,
    parse_result,
    serialize_maneuvers,
    serialize_network,
    serialize_result,
)
from maneuver_routing.maneuvers import INF


def test_net_b_fixture_shape(net_b):
    assert net_b.graph.vertex_count == 16
    assert net_b.graph.edge_count == 17
    assert [m.penalty for m in net_b.maneuvers] == [-3, INF, 5, 9, 0]


def test_net_a_fixture_shape(net_a):
    assert net_a.graph.vertex_count == 6
    assert net_a.graph.edge_count == 10
    assert [m.penalty for m in net_a.maneuvers] == [INF, 1]


def diagnostics(exc):
    return [(d.line, d.column) for d in exc.value.diagnostics]


def test_negative_weight_rejected():
    with pytest.raises(ParseError) as info:
        parse_network("edge a b -1\n")
    assert "negative" in str(info.value)
    assert diagnostics(info) == [(1, 10)]


def test_errors_are_collected_with_positions():
    text = "# header\nedge a b 1\nedgy a b 1\nedge a c x\nedge a\n"
    with pytest.raises(ParseError) as info:
        parse_network(text)
    assert diagnostics(info) == [(3, 1), (4, 10), (5, 1)]


@pytest.mark.parametrize("token", ["nan", "Infinity", "1e400x", "0x10", ""])
def test_parse_number_rejects(token):
    with pytest.raises(ValueError):
        parse_number(token, allow_inf=True)


def test_parse_number_accepts():
    assert parse_number("inf", allow_inf=True) == INF
    assert parse_number("-2.5", allow_inf=False) == -2.5
    with pytest.raises(ValueError):
        parse_number("inf", allow_inf=False)


def test_ambiguous_vertex_sequence_rejected():
    g = parse_network("edge a b 1 x\nedge a b 2 y\n")
    with pytest.raises(ParseError):
        parse_maneuvers("maneuver 1 a b\n", g)
    ms = parse_maneuvers("maneuver* 1 a y\n", g)
    assert ms[1].walk.edges == (1,)


def test_maneuver_errors():
    g = parse_network("edge a b 1\n")
    with pytest.raises(ParseError) as info:
        parse_maneuvers("maneuver 1 a c\nmaneuver nan a\nturn 1 a\n", g)
    assert [d.line for d in info.value.diagnostics] == [1, 2, 3]


def test_label_may_not_shadow_vertex():
    with pytest.raises(ParseError):
        parse_network("edge a b 1 b\n")


def test_isolated_vertex_directive():
    g = parse_network("vertex z\nedge a b 1\n")
    assert g.vertex_count == 3
    assert serialize_network(g).splitlines()[0] == "vertex z"


def test_network_roundtrip(net_a, net_b):
    for net in (net_a, net_b):
        text = serialize_network(net.graph)
        mtext = serialize_maneuvers(net.graph, net.maneuvers)
        again = load_network(text, mtext)
        assert serialize_network(again.graph) == text
        assert serialize_maneuvers(again.graph, again.maneuvers) == mtext


def test_result_for_net_b(net_b):
    r = shortest_valid_walk(net_b, vid(net_b, "a"), vid(net_b, "m"))
    lines = serialize_result(net_b.graph, r).splitlines()
    assert lines[:2] == ["distance 9", "walk a b c d e f g h i j k l m"]


def test_result_for_unreachable(net_b):
    r = shortest_valid_walk(net_b, vid(net_b, "t"), vid(net_b, "a"))
    lines = serialize_result(net_b.graph, r).splitlines()
    assert lines[0] == "distance inf"
    assert not any(line.startswith("walk") for line in lines)


def test_result_with_labels(net_a):
    r = shortest_valid_walk(net_a, vid(net_a, "a"), vid(net_a, "c"))
    text = serialize_result(net_a.graph, r)
    assert text.splitlines()[1] == "walk a ab b bd d db b bc c"
    assert parse_result(text, net_a.graph) == r


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.data())
def test_result_roundtrip(seed, data):
    net = generated(seed)
    n = net.graph.vertex_count
    s = data.draw(st.integers(0, n - 1))
    t = data.draw(st.integers(0, n - 1))
    r = shortest_valid_walk(net, s, t)
    assert parse_result(serialize_result(net.graph, r), net.graph) == r
    best = QueryResult(r.distance, r.walk, QueryStats(pairs_scanned=3), best_effort=True)
    assert parse_result(serialize_result(net.graph, best), net.graph) == best


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_generated_network_roundtrip(seed):
    net = generated(seed)
    text = serialize_network(net.graph)
    mtext = serialize_maneuvers(net.graph, net.maneuvers)
    again = load_network(text, mtext)
    assert [m.walk for m in again.maneuvers] == [m.walk for m in net.maneuvers]
    assert [m.penalty for m in again.maneuvers] == [m.penalty for m in net.maneuvers]
    assert serialize_network(again.graph) == text
