import math
import random

import pytest
from conftest import generated, vid, walk
from hypothesis import given, settings
from hypothesis import strategies as st

from maneuver_routing.formats import fixture_text, load_fixture, load_network
from maneuver_routing.maneuvers import (
    INF,
    ROOT,
    Maneuver,
    ManeuverSet,
    advance,
    build_automaton,
    check_proper,
    classify,
    contexts_at,
    divergent,
    format_value,
    is_valid,
    overhangs,
    penalized_weight,
    restricted_direction,
)
from maneuver_routing.network import Graph, InputError, RoadNetwork, Walk
from maneuver_routing.oracle import BruteModel, brute_penalized_weight


def with_extra_edges(name, *extra):
    network, maneuvers = fixture_text(name)
    lines = "".join(f"edge {u} {v} 1\n" for u, v in extra)
    return load_network(network + lines, maneuvers)


def random_walk(net, rng, length):
    g = net.graph
    start = v = rng.randrange(g.vertex_count)
    edges = []
    for _ in range(length):
        out = g.out_edge_ids(v)
        if not out:
            break
        e = rng.choice(out)
        edges.append(e)
        v = g.edges[e].head
    return g.walk(start, edges)


def context_names(net, xs):
    return sorted(net.automaton.format(x) for x in xs)


@pytest.mark.parametrize(
    "penalty, kind",
    [(-0.5, "negative"), (2, "positive"), (0, "restricted"), (INF, "prohibited")],
)
def test_classify(penalty, kind):
    assert classify(penalty) == kind


@pytest.mark.parametrize("penalty", [math.nan, -INF])
def test_bad_penalties_rejected(penalty):
    with pytest.raises(InputError):
        Maneuver(1, Walk((0,)), penalty)


def test_c_m(net_b):
    # b carries M1 and M2; i, j, k, l each carry only M5 and l also M2.
    assert net_b.maneuvers.c_m == 2


def test_states_net_b(net_b):
    aut = net_b.automaton
    assert context_names(net_b, aut.contexts()) == sorted(
        ["∅", "(b,c)", "(b,c,d)", "(b,c,d,e)", "(b,r)", "(g,h)", "(i,j)", "(i,j,k)"]
    )


def test_states_net_a(net_a):
    assert context_names(net_a, net_a.automaton.contexts()) == ["(a,b)", "∅"]


def test_empty_maneuver_set_has_only_root(net_b):
    aut = build_automaton(net_b.graph, ManeuverSet())
    assert aut.contexts() == [ROOT]


def test_contexts_at(net_a, net_b):
    assert context_names(net_a, contexts_at(net_a.automaton, vid(net_a, "b"))) == ["(a,b)", "∅"]
    assert context_names(net_b, contexts_at(net_b.automaton, vid(net_b, "e"))) == [
        "(b,c,d,e)",
        "∅",
    ]
    assert context_names(net_b, contexts_at(net_b.automaton, vid(net_b, "m"))) == ["∅"]


def _ctx(net, *names):
    target = net.graph.walk_from_names(names)
    return next(x for x in net.automaton.contexts() if net.automaton.walks[x] == target)


def _edge(net, u, v):
    return net.graph.edges_between(vid(net, u), vid(net, v))[0].id


def test_advance_examples(net_b):
    aut = net_b.automaton
    x, done = advance(aut, _ctx(net_b, "b", "c", "d", "e"), _edge(net_b, "e", "f"))
    assert x == ROOT and [m.name for m in done] == ["M1"]
    x, done = advance(aut, _ctx(net_b, "g", "h"), _edge(net_b, "h", "s"))
    assert x == ROOT and sorted(m.name for m in done) == ["M3", "M4"]
    assert advance(aut, ROOT, _edge(net_b, "a", "b")) == (ROOT, [])
    x, done = advance(aut, ROOT, _edge(net_b, "b", "c"))
    assert aut.format(x) == "(b,c)" and done == []


def test_advance_rejects_wrong_tail(net_b):
    with pytest.raises(InputError):
        advance(net_b.automaton, _ctx(net_b, "b", "c"), _edge(net_b, "e", "f"))


def test_penalized_weight_examples(net_a, net_b):
    g = net_a.graph
    assert penalized_weight(net_a, g.walk_from_labels("a", ["ab", "bc"])) == INF
    detour = g.walk_from_labels("a", ["ab", "bf", "fe", "ed", "db", "bc"])
    assert penalized_weight(net_a, detour) == 7
    p2 = walk(net_b, *"abcdefghijklm")
    assert penalized_weight(net_b, p2) == 9
    assert penalized_weight(net_b, Walk((vid(net_b, "a"),))) == 0
    assert penalized_weight(net_b, Walk((vid(net_b, "s"),))) == 9


def test_repeated_occurrences_are_each_charged():
    g = Graph()
    g.add_edge("u", "v", 1)
    g.add_edge("v", "u", 1)
    ms = ManeuverSet([Maneuver(1, g.walk_from_names(["u", "v", "u"]), 2)])
    net = RoadNetwork(g, ms)
    p = g.walk_from_names(["u", "v", "u", "v", "u"])
    assert penalized_weight(net, p) == 4 + 2 * 2


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6), st.integers(0, 10))
def test_automaton_matches_brute_force(seed, walk_seed, length):
    net = generated(seed)
    aut = net.automaton
    model = BruteModel(net)
    p = random_walk(net, random.Random(walk_seed), length)
    x = ROOT
    for k, e in enumerate(p.edges):
        x, penalty, _ = aut.step(x, e)
        seq = p.edges[: k + 1]
        want = model.context(seq)
        got = aut.walks[x].edges if x != ROOT else ()
        assert got == want
        assert penalty == model.completion_penalty(seq)
        assert set(aut.forced[x]) == model.required(want)
    assert penalized_weight(net, p) == brute_penalized_weight(net, p)


def test_is_valid_examples(net_b):
    assert not is_valid(net_b, walk(net_b, "a", "b", "r", "l", "m"))
    assert is_valid(net_b, walk(net_b, *"abcdefghijklm"))
    # Ending inside the restricted maneuver (i,j,k,l) is allowed.
    assert is_valid(net_b, walk(net_b, *"abcdefghij"))


def test_is_valid_rejects_leaving_restricted_early():
    net = with_extra_edges("net_b", ("j", "t"))
    assert not is_valid(net, walk(net, "h", "i", "j", "t"))
    assert is_valid(net, walk(net, "h", "i", "j"))
    assert is_valid(net, walk(net, "j", "t"))


def test_divergent(net_a):
    g = net_a.graph
    q1 = g.walk_from_labels("a", ["ab", "bc"])
    q2 = g.walk_from_labels("a", ["ab", "bf"])
    assert divergent(q1, q2)
    assert not divergent(q1, q1)
    assert not divergent(q1, g.walk_from_labels("d", ["de", "ef"]))


def test_overhangs():
    net = with_extra_edges("net_b", ("f", "x"))
    q1 = walk(net, "b", "c", "d", "e", "f")
    assert overhangs(q1, walk(net, "e", "f", "x"))
    assert not overhangs(q1, walk(net, "g", "h"))
    assert not overhangs(Walk((vid(net, "f"),)), walk(net, "f", "x"))


def test_fixtures_are_proper(net_a, net_b):
    assert check_proper(net_a).proper
    assert check_proper(net_b).proper


@pytest.mark.parametrize(
    "name, rule", [("net_b_rule_i", "i"), ("net_b_rule_ii", "ii"), ("net_b_rule_iii", "iii")]
)
def test_mutants_report_their_rule(name, rule):
    report = check_proper(load_fixture(name))
    assert report.rules == {rule}


def test_rule_iii_message():
    report = check_proper(load_fixture("net_b_rule_iii"))
    assert report.format().splitlines()[1] == "rule iii: penalty of M1=(b,c,d,e,f) is -5, below -4"


def test_divergent_restricted_pair():
    g = Graph()
    g.add_edge("u", "v", 1)
    g.add_edge("v", "x", 1)
    g.add_edge("v", "y", 1)
    ms = ManeuverSet(
        [
            Maneuver(1, g.walk_from_names(["u", "v", "x"]), 0),
            Maneuver(2, g.walk_from_names(["u", "v", "y"]), 0),
        ]
    )
    assert check_proper(RoadNetwork(g, ms)).rules == {"i"}


def test_restricted_repeat_conflict():
    # In (p,q,p,q,r) the edge p->q repeats: after its second use the
    # maneuver demands q->r while the repeat demands q->p.
    g = Graph()
    g.add_edge("p", "q", 1)
    g.add_edge("q", "p", 1)
    g.add_edge("p", "r", 1)
    ms = ManeuverSet([Maneuver(1, g.walk_from_names(["p", "q", "p"]), 0)])
    assert check_proper(RoadNetwork(g, ms)).proper
    g.add_edge("q", "r", 1)
    bad = ManeuverSet([Maneuver(1, g.walk_from_names(["p", "q", "p", "q", "r"]), 0)])
    assert check_proper(RoadNetwork(g, bad)).rules == {"i"}


def test_restricted_direction(net_b):
    aut = net_b.automaton
    assert restricted_direction(aut, vid(net_b, "j"), _ctx(net_b, "i", "j")) == {
        _edge(net_b, "j", "k")
    }
    assert restricted_direction(aut, vid(net_b, "i"), ROOT) == frozenset()
    assert restricted_direction(aut, vid(net_b, "k"), _ctx(net_b, "i", "j", "k")) == {
        _edge(net_b, "k", "l")
    }
    with pytest.raises(InputError):
        restricted_direction(aut, vid(net_b, "a"), _ctx(net_b, "i", "j"))


@pytest.mark.parametrize(
    "value, text",
    [(9.0, "9"), (INF, "inf"), (0.5, "0.5"), (-3.0, "-3"), (0.1 + 0.2, "0.30000000000000004")],
)
def test_format_value(value, text):
    assert format_value(value) == text
