import random

import pytest
from hypothesis import given, settings, strategies as st

from petristruct.bounds import is_structurally_bounded
from petristruct.coverability import (
    DEAD,
    LIVE,
    NOT_LIVE,
    OMEGA,
    UNKNOWN,
    TreeBudgetError,
    build_lct,
    lct_labels,
    live_by_home_space,
    live_via_home_state,
    liveness_report,
    omega_text,
)
from petristruct.graph import Predicate, build_rg, home_states, live_transitions_exact
from petristruct.models import all_fixtures, live_home_net, producer, tn, tned
from petristruct.net import Net, NetError, enabled

from helpers import conservative_net, random_marking, random_net

TN2 = tn(2).net


def test_producer_tree():
    tree = build_lct(producer().net, (0,))
    assert [n.marking for n in tree.nodes] == [(0,), (OMEGA,), (OMEGA,)]
    assert [n.status for n in tree.nodes] == ["interior", "interior", "duplicate"]
    assert lct_labels(tree) == {"t"}
    assert omega_text(tree.nodes[1].marking) == "(ω)"
    assert tree.has_omega()


def test_bounded_tree():
    tree = build_lct(TN2, (5, 0))
    assert not tree.has_omega()
    assert lct_labels(tree) == {"t1", "t2"}
    assert {n.marking for n in tree.nodes} <= set(build_rg(TN2, [(5, 0)]).nodes)
    tree = build_lct(TN2, (1, 0))
    assert len(tree.nodes) == 1 and lct_labels(tree) == set()
    assert tree.nodes[0].status == "frontier"


def test_tree_deterministic_and_dot():
    a = build_lct(tned(2, 1, 0).net, (1, 2, 0))
    b = build_lct(tned(2, 1, 0).net, (1, 2, 0))
    assert [n.marking for n in a.nodes] == [n.marking for n in b.nodes]
    dot = a.to_dot()
    assert dot.startswith('digraph "tned2_lct"') and "->" in dot


def test_tree_budget():
    net = Net.from_arcs("fan", ("A", "B", "C"), ("a", "b", "c"),
                        {("a", "A"): 1, ("b", "B"): 1, ("c", "C"): 1})
    with pytest.raises(TreeBudgetError):
        build_lct(net, (0, 0, 0), max_nodes=5)


def test_acceleration_chain():
    # t moves a token from A to B and adds one to C; u refills A from C
    net = Net.from_arcs("acc", ("A", "B"), ("t", "u"),
                        {("A", "t"): 1, ("t", "A"): 1, ("t", "B"): 1,
                         ("B", "u"): 2, ("u", "A"): 1, ("u", "B"): 1})
    tree = build_lct(net, (1, 0))
    omegas = {n.marking for n in tree.nodes if OMEGA in n.marking}
    assert (OMEGA, OMEGA) in omegas


def test_live_via_home_state():
    fx = tned(3, 4, 1)
    live = live_via_home_state(fx.net, fx.fact("home_state"))
    assert live == set(fx.net.transitions) - {"t_2_1", "t_2_2"}
    assert live_via_home_state(TN2, (5, 0)) == {"t1", "t2"}
    rg = build_rg(TN2, [(4, 0)])
    with pytest.raises(NetError):
        live_via_home_state(TN2, (4, 0), certificate=rg)
    assert live_via_home_state(TN2, (0, 2), certificate=rg) == set()


def test_enabled_at_home_state_is_live():
    for fx in all_fixtures():
        rg = build_rg(fx.net, fx.init_markings(), cap=5000)
        if not rg.complete:
            continue
        for h in home_states(rg)[:3]:
            live = live_via_home_state(fx.net, h, rg)
            for t in fx.net.transitions:
                if enabled(fx.net, h, t):
                    assert t in live


def test_report_examples():
    r = liveness_report(tn(3).net, [(7, 0)])
    assert r.live is True and r.rg_complete
    r = liveness_report(tn(3).net, [(2, 0)])
    assert r.live is False
    assert all(v.status == DEAD for v in r.transitions.values())
    assert all("theta" in v.evidence for v in r.transitions.values())
    fx = live_home_net()
    r = liveness_report(fx.net, fx.init_markings())
    assert r.live is True
    assert r.home_state is not None and r.home_state != fx.q0
    assert r.contradiction is None


def test_report_not_live_evidence():
    r = liveness_report(TN2, [(4, 0)])
    assert r.with_status(NOT_LIVE) == {"t1", "t2"}
    assert "(0" not in r.transitions["t1"].evidence
    assert "B:2" in r.transitions["t1"].evidence


def test_report_dead_by_graph():
    # t2 needs B, which is never marked; t1 fires exactly once
    net = Net.from_arcs("nd", ("A", "B", "C"), ("t1", "t2"),
                        {("A", "t1"): 1, ("t1", "C"): 1, ("B", "t2"): 1, ("t2", "C"): 1})
    r = liveness_report(net, [(1, 0, 0)])
    assert r.transitions["t2"].status == DEAD
    assert r.transitions["t1"].status == NOT_LIVE


def test_report_truncated():
    p = producer().net
    r = liveness_report(p, [(0,)], cap=10)
    assert r.live is None and r.transitions["t"].status == UNKNOWN
    r = liveness_report(p, [(0,)], cap=10, assume_home_state=(0,))
    assert r.live is True and r.assumed
    assert "assumed" in r.transitions["t"].evidence
    # a transition that can never fire in an unbounded net is still caught
    net = Net.from_arcs("pd", ("p", "q"), ("t", "u"), {("t", "p"): 1, ("q", "u"): 1})
    r = liveness_report(net, [(0, 0)], cap=10)
    assert r.transitions["u"].status == DEAD and r.transitions["t"].status == UNKNOWN


def test_report_assumed_contradiction():
    r = liveness_report(TN2, [(4, 0)], assume_home_state=(4, 0))
    assert r.contradiction is not None and r.assumed
    r = liveness_report(TN2, [(4, 0)], assume_home_state=(0, 2))
    assert r.contradiction is None


def test_report_multiple_init():
    r = liveness_report(TN2, [(4, 0), (5, 0)])
    assert r.live is False
    with pytest.raises(ValueError):
        liveness_report(TN2, [])


@pytest.mark.parametrize("i", [2, 3, 4])
def test_home_space_inside_domain(i):
    for n in range(1, 10):
        fx = tn(i, n, 0)
        if not fx.fact("live"):
            continue
        rg = build_rg(fx.net, [fx.q0])
        H = Predicate.parse(fx.net, fx.fact("home_space_query"))
        assert live_by_home_space(rg, H, "t2") is True
        assert "t2" in liveness_report(fx.net, [fx.q0]).with_status(LIVE)


def test_lct_rg_label_agreement_fixtures():
    # tree size grows with the number of paths, so only small graphs are used
    for fx in all_fixtures():
        if not is_structurally_bounded(fx.net):
            continue
        for q in fx.init_markings():
            rg = build_rg(fx.net, [q])
            if len(rg.nodes) > 25:
                continue
            assert lct_labels(build_lct(fx.net, q)) == rg.labels()


def test_theta_consistency_fixtures():
    for fx in all_fixtures():
        r = liveness_report(fx.net, fx.init_markings(), cap=5000)
        assert not (r.with_status(LIVE) & r.with_status(DEAD))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_karp_miller_terminates_and_covers(seed):
    rng = random.Random(seed)
    d, m = rng.randint(1, 6), rng.randint(1, 6)
    net = random_net(rng, d, m, wmax=3)
    q0 = random_marking(rng, d, 2)
    tree = build_lct(net, q0, max_nodes=200_000)
    rg = build_rg(net, [q0], cap=300)
    nodes = [n.marking for n in tree.nodes]
    for q in rg.nodes:
        assert any(all(a >= b for a, b in zip(n, q)) for n in nodes)
    assert rg.labels() <= lct_labels(tree)
    if rg.complete:
        assert lct_labels(tree) == rg.labels()
        assert not tree.has_omega()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_home_state_liveness_random(seed):
    rng = random.Random(seed)
    d = rng.randint(1, 4)
    net = random_net(rng, d, rng.randint(1, 4), wmax=2, density=0.4)
    q0 = random_marking(rng, d, 3)
    rg = build_rg(net, [q0], cap=2000)
    if not rg.complete:
        return
    exact = live_transitions_exact(rg)
    for h in home_states(rg):
        assert live_via_home_state(net, h, rg) == exact
    r = liveness_report(net, [q0], cap=2000)
    assert r.with_status(LIVE) == exact
    assert r.contradiction is None


def _reference_tree(net, q0):
    """Plain recursive Karp-Miller with a full ancestor scan."""
    out = []

    def visit(m, ancestors, label, parent):
        idx = len(out)
        out.append((m, parent, label))
        if m in ancestors:
            return
        chain = ancestors + [m]
        for t, pre, delta in zip(net.transitions, net.pre_columns, net.delta_columns):
            if all(x >= w for x, w in zip(m, pre)):
                nxt = [x + dx for x, dx in zip(m, delta)]
                grew = True
                while grew:
                    grew = False
                    for a in chain:
                        if a != tuple(nxt) and all(x <= y for x, y in zip(a, nxt)):
                            for k in range(len(nxt)):
                                if nxt[k] > a[k] and nxt[k] != OMEGA:
                                    nxt[k] = OMEGA
                                    grew = True
                visit(tuple(nxt), chain, t, idx)

    visit(tuple(q0), [], None, None)
    return out


def _by_label_path(nodes):
    paths = {}
    for k, (m, parent, label) in enumerate(nodes):
        paths[k] = () if parent is None else paths[parent] + (label,)
    return {paths[k]: m for k, (m, _, _) in enumerate(nodes)}


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_tree_matches_reference(seed):
    rng = random.Random(seed)
    d = rng.randint(1, 4)
    net = (random_net if seed % 2 else conservative_net)(rng, d, rng.randint(1, 4), wmax=2)
    q0 = random_marking(rng, d, 2)
    try:
        tree = build_lct(net, q0, max_nodes=3000)
    except TreeBudgetError:
        return
    assert _by_label_path([(n.marking, n.parent, n.label) for n in tree.nodes]) == \
        _by_label_path(_reference_tree(net, q0))
    # ids are assigned when the parent is expanded, so parents come first
    assert all(n.parent is None or n.parent < k for k, n in enumerate(tree.nodes))
