import random

import pytest
from hypothesis import given, settings, strategies as st

from petristruct.graph import (
    IncompleteGraphError,
    MarkingSet,
    Predicate,
    brute_force_home_space,
    build_rg,
    condense,
    home_states,
    initial_is_home_state,
    is_home_space,
    is_strongly_connected,
    live_transitions_exact,
    tarjan,
)
from petristruct.models import home_space_machine, producer, state_machine, tn, tned, unit
from petristruct.net import Net, NetError

from helpers import random_marking, random_net

TN2 = tn(2).net


def test_build_rg():
    rg = build_rg(TN2, [(5, 0)])
    assert set(rg.nodes) == {(5, 0), (3, 1), (1, 2)} and rg.complete
    rg = build_rg(TN2, [(4, 0)])
    assert set(rg.nodes) == {(4, 0), (2, 1), (0, 2)}
    assert rg.successors[rg.index[(0, 2)]] == ()
    rg = build_rg(producer().net, [(0,)], cap=10)
    assert not rg.complete and len(rg.nodes) == 10
    with pytest.raises(ValueError):
        build_rg(TN2, [])
    with pytest.raises(ValueError):
        build_rg(TN2, [(1, 0)], cap=0)


def test_build_rg_deterministic():
    a = build_rg(tned(3, 4, 1).net, [tned(3, 4, 1).q0])
    b = build_rg(tned(3, 4, 1).net, [tned(3, 4, 1).q0])
    assert a.nodes == b.nodes and a.edges == b.edges


def test_condense():
    c = condense(build_rg(TN2, [(5, 0)]))
    assert len(c.components) == 1 and c.sinks == (0,)
    rg = build_rg(TN2, [(4, 0)])
    c = condense(rg)
    assert len(c.sinks) == 1
    assert [rg.nodes[v] for v in c.components[c.sinks[0]]] == [(0, 2)]
    line = Net.from_arcs("line", ("a", "b"), ("t",), {("a", "t"): 1, ("t", "b"): 1})
    rg = build_rg(line, [(1, 0)])
    c = condense(rg)
    assert len(c.components) == 2
    assert [rg.nodes[v] for v in c.components[c.sinks[0]]] == [(0, 1)]


def test_tarjan_deep_chain():
    n = 50_000
    comps = tarjan(n, lambda v: [v + 1] if v + 1 < n else [])
    assert len(comps) == n


def test_home_space_examples():
    rg5 = build_rg(TN2, [(5, 0)])
    rg4 = build_rg(TN2, [(4, 0)])
    assert is_home_space(rg5, [(1, 2)]).status == "yes"
    v = is_home_space(rg4, [(4, 0)])
    assert v.status == "no" and v.witness == ((0, 2),)
    assert is_home_space(rg4, rg4.nodes).status == "yes"
    assert brute_force_home_space(rg5, [(1, 2)])
    assert not brute_force_home_space(rg4, [(4, 0)])
    assert brute_force_home_space(rg4, rg4.nodes)
    single = build_rg(TN2, [(1, 0)])
    assert brute_force_home_space(single, [(1, 0)])
    assert not brute_force_home_space(single, [])
    assert is_home_space(single, []).status == "no"


def test_home_space_inconclusive():
    rg = build_rg(producer().net, [(0,)], cap=5)
    assert is_home_space(rg, [(0,)]).status == "inconclusive"
    with pytest.raises(IncompleteGraphError):
        home_states(rg)
    with pytest.raises(IncompleteGraphError):
        live_transitions_exact(rg)


def test_predicate_queries():
    p = Predicate.parse(TN2, "A>=1 and B>=1")
    assert p.contains((1, 1)) and not p.contains((0, 2))
    assert str(p) == "A>=1 and B>=1"
    assert Predicate.parse(TN2, "A = 0").contains((0, 5))
    with pytest.raises(NetError):
        Predicate.parse(TN2, "A >= x")
    with pytest.raises(NetError):
        Predicate.parse(TN2, "Z >= 1")
    rg = build_rg(TN2, [(5, 0)])
    assert is_home_space(rg, p).status == "yes"
    assert is_home_space(rg, lambda q: q[1] == 2).status == "yes"


def test_marking_set_algebra():
    a = MarkingSet.of([(1, 0), (0, 1)])
    b = MarkingSet.of([(0, 1)])
    assert (a & b).markings == {(0, 1)}
    assert (a | b).markings == a.markings


def test_home_states():
    assert set(home_states(build_rg(TN2, [(5, 0)]))) == {(5, 0), (3, 1), (1, 2)}
    fx = tned(3, 4, 1)
    assert fx.fact("home_state") in home_states(build_rg(fx.net, [fx.q0]))
    sm = home_space_machine()
    assert home_states(build_rg(sm.net, sm.init_markings())) == ()


def test_strong_connectivity():
    rg = build_rg(TN2, [(5, 0)])
    assert is_strongly_connected(rg) and initial_is_home_state(rg)
    rg = build_rg(TN2, [(4, 0)])
    assert not is_strongly_connected(rg) and not initial_is_home_state(rg)
    rg = build_rg(TN2, [(1, 0)])
    assert is_strongly_connected(rg) and initial_is_home_state(rg)
    with pytest.raises(NetError):
        initial_is_home_state(build_rg(TN2, [(1, 0), (5, 0)]))


def test_live_transitions_exact():
    assert live_transitions_exact(build_rg(TN2, [(5, 0)])) == {"t1", "t2"}
    assert live_transitions_exact(build_rg(TN2, [(4, 0)])) == set()
    fx = tned(3, 4, 1)
    live = live_transitions_exact(build_rg(fx.net, [fx.q0]))
    assert live == set(fx.net.transitions) - {"t_2_1", "t_2_2"}


def test_intersection_not_closed():
    fx = home_space_machine()
    rg = build_rg(fx.net, [fx.markings["q2"]])
    H1 = [unit(8, k) for k in (3, 5, 6)]
    H2 = [unit(8, k) for k in (3, 7)]
    assert is_home_space(rg, H1) and is_home_space(rg, H2)
    both = MarkingSet.of(H1) & MarkingSet.of(H2)
    assert both.markings == {unit(8, 3)}
    assert is_home_space(rg, both).status == "no"


def test_dot_export():
    text = build_rg(TN2, [(5, 0)]).to_dot()
    assert text.startswith('digraph "tn2"') and '[label="t1"]' in text


def _random_complete_graph(rng, cap=2000):
    while True:
        d = rng.randint(1, 4)
        net = random_net(rng, d, rng.randint(1, 4), wmax=2, density=0.4)
        init = [random_marking(rng, d, 2) for _ in range(rng.randint(1, 2))]
        rg = build_rg(net, init, cap)
        if rg.complete:
            return net, init, rg


def _random_query(rng, rg):
    k = rng.randint(0, min(4, len(rg.nodes)))
    return MarkingSet.of(rng.sample(rg.nodes, k))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_johnen_random(seed):
    rng = random.Random(seed)
    net, init, rg = _random_complete_graph(rng)
    for _ in range(3):
        H = _random_query(rng, rg)
        assert (is_home_space(rg, H).status == "yes") == brute_force_home_space(rg, H)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_union_and_subset_rules(seed):
    rng = random.Random(seed)
    net = random_net(rng, 3, 3, wmax=2, density=0.4)
    A1 = [random_marking(rng, 3, 2)]
    A2 = [random_marking(rng, 3, 2)]
    rg1, rg2 = build_rg(net, A1, 2000), build_rg(net, A2, 2000)
    rg12 = build_rg(net, A1 + A2, 2000)
    if not (rg1.complete and rg2.complete and rg12.complete):
        return
    H1 = _random_query(rng, rg1) | MarkingSet.of(home_states(rg1)[:1])
    H2 = _random_query(rng, rg2) | MarkingSet.of(home_states(rg2)[:1])
    if is_home_space(rg1, H1) and is_home_space(rg2, H2):
        assert is_home_space(rg12, H1 | H2)
    if is_home_space(rg12, H1):
        assert is_home_space(rg1, H1) and is_home_space(rg2, H1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_sinks_and_home_state_closure(seed):
    rng = random.Random(seed)
    net, init, rg = _random_complete_graph(rng)
    H = _random_query(rng, rg)
    if is_home_space(rg, H):
        for v, succ in enumerate(rg.successors):
            if not succ:
                assert H.contains(rg.nodes[v])
    hs = set(home_states(rg))
    for h in hs:
        sub = build_rg(net, [h])
        assert set(sub.nodes) <= hs


def test_state_machine_helper():
    net = state_machine("sm", 3, [(0, 1), (1, 2), (2, 0)])
    rg = build_rg(net, [unit(3, 0)])
    assert is_strongly_connected(rg)
