"""Parameterized and fixed example nets, each with its expected facts.

Every constructor returns a :class:`Fixture` whose ``facts`` are plain
data checked by the test suite against the analysis modules.  The small
fixed examples also verify their own defining properties when
built and raise :class:`FixtureError` if one fails.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from petristruct.graph import (
    MarkingSet,
    build_rg,
    home_states,
    is_home_space,
    live_transitions_exact,
    reachable_from,
)
from petristruct.linalg import Vector
from petristruct.net import Net, NetDocument, NetError, serialize_net


class FixtureError(NetError):
    """A fixture does not satisfy the facts it was built for."""


@dataclass(frozen=True)
class Fact:
    """``origin`` is ``stated`` for facts given with the example, ``derived`` otherwise."""

    name: str
    value: Any
    origin: str = "derived"


@dataclass(frozen=True)
class Fixture:
    name: str
    net: Net
    markings: dict[str, Vector]
    init: tuple[str, ...]
    facts: tuple[Fact, ...] = field(default=())

    def fact(self, name: str) -> Any:
        for f in self.facts:
            if f.name == name:
                return f.value
        raise KeyError(name)

    def has_fact(self, name: str) -> bool:
        return any(f.name == name for f in self.facts)

    def init_markings(self) -> list[Vector]:
        return [self.markings[m] for m in self.init]

    @property
    def q0(self) -> Vector:
        return self.markings[self.init[0]]

    def document(self) -> NetDocument:
        return NetDocument(self.net, dict(self.markings), self.init)

    def text(self) -> str:
        return serialize_net(self.net, self.markings, self.init)


# -- the two parameterized families ------------------------------------------

def tn_live(i: int, n: int, x: int) -> bool:
    """Closed form: live iff g.q0 > i and g.q0 is not a multiple of i."""
    g = n + i * x
    return g > i and g % i != 0


def tn(i: int, n: int = 5, x: int = 0) -> Fixture:
    """Two places A, B; t1 takes i from A and gives one to B, t2 takes one
    from each and gives i+1 to A."""
    if i < 1:
        raise NetError("tn needs i >= 1")
    if n < 0 or x < 0:
        raise NetError("tn needs a non-negative marking")
    net = Net.from_arcs(f"tn{i}", ("A", "B"), ("t1", "t2"), {
        ("A", "t1"): i, ("t1", "B"): 1,
        ("A", "t2"): 1, ("B", "t2"): 1, ("t2", "A"): i + 1,
    })
    gq0 = n + i * x
    facts = [
        Fact("semiflows_N", ((1, i),), "stated"),
        Fact("g_q0", gq0),
        Fact("live", tn_live(i, n, x), "stated"),
    ]
    if tn_live(i, n, x):
        facts.append(Fact("home_space_query", "A>=1 and B>=1", "stated"))
    if gq0 < i:
        facts.append(Fact("dead", frozenset({"t1", "t2"}), "stated"))
    return Fixture(f"tn{i}_{n}_{x}", net, {"m0": (n, x)}, ("m0",), tuple(facts))


def tned_transition(j: int, k: int) -> str:
    return f"t_{j}_{k}"


def tned(i: int, n: int = 4, x: int = 1) -> Fixture:
    """Places A_0..A_{i-1}, B.  t_j_1 takes i from A_j and gives one to B;
    t_j_2 takes one from A_j and one from B and gives i+1 to A_j."""
    if i < 2:
        raise NetError("tned needs i >= 2")
    if n < 1 or x < 0:
        raise NetError("tned needs n >= 1 and x >= 0")
    places = tuple(f"A_{j}" for j in range(i)) + ("B",)
    transitions = []
    arcs = {}
    for j in range(i):
        a, t1, t2 = f"A_{j}", tned_transition(j, 1), tned_transition(j, 2)
        transitions += [t1, t2]
        arcs[(a, t1)] = i
        arcs[(t1, "B")] = 1
        arcs[(a, t2)] = 1
        arcs[("B", t2)] = 1
        arcs[(t2, a)] = i + 1
    net = Net.from_arcs(f"tned{i}", places, tuple(transitions), arcs)
    q0 = tuple(n + j for j in range(i)) + (x,)
    alpha = tuple((n + j) % i for j in range(i))
    k = alpha.index(0)
    qh = alpha + (x + n,)
    gq0 = sum(q0[:i]) + i * x
    assert 2 * gq0 == i * (2 * (x + n) + i - 1)
    facts = (
        Fact("semiflows_N", ((1,) * i + (i,),), "stated"),
        Fact("g_q0", gq0, "stated"),
        Fact("alpha", alpha, "stated"),
        Fact("k", k),
        Fact("home_state", qh, "stated"),
        Fact("non_live", frozenset({tned_transition(k, 1), tned_transition(k, 2)}), "stated"),
        Fact("remainder", (n % i, (i - k) % i), "stated"),
        Fact("live", False),
    )
    return Fixture(f"tned{i}_{n}_{x}", net, {"m0": q0, "qh": qh}, ("m0",), facts)


# -- small fixed examples -----------------------------------------------------------

def _require(ok: bool, what: str) -> None:
    if not ok:
        raise FixtureError(what)


def fq_inv_net() -> Fixture:
    """f = (1,1,0) is constant on every marking reachable from (1,0,0) but
    is not a semiflow: t1 would lower it and is never enabled."""
    net = Net.from_arcs("fq_inv", ("p1", "p2", "p3"), ("t0", "t1"), {
        ("p1", "t0"): 1, ("t0", "p2"): 1,
        ("p1", "t1"): 1, ("p3", "t1"): 1, ("t1", "p3"): 1,
    })
    qi = (1, 0, 0)
    f = (1, 1, 0)
    rs = frozenset(build_rg(net, [qi]).nodes)
    _require(rs == {(1, 0, 0), (0, 1, 0)}, "reachability set differs")
    pre1 = sum(a * b for a, b in zip(f, net.pre_of("t1")))
    post1 = sum(a * b for a, b in zip(f, net.post_of("t1")))
    _require((pre1, post1) == (1, 0), "f does not drop across t1")
    facts = (
        Fact("f", f, "stated"),
        Fact("reachable", rs, "stated"),
        Fact("f_is_semiflow", False, "stated"),
        Fact("f_q_invariant", True, "stated"),
    )
    return Fixture("fq_inv", net, {"qi": qi}, ("qi",), facts)


def threshold_net() -> Fixture:
    """θ(t1) = 3/2 ≥ 1 and still t1 never fires."""
    net = Net.from_arcs("cs_threshold", ("A", "B"), ("t1", "t2"), {
        ("A", "t1"): 2, ("t1", "B"): 2,
        ("A", "t2"): 1, ("t2", "B"): 1,
    })
    rg = build_rg(net, [(1, 2)])
    _require("t1" not in rg.labels(), "t1 fires")
    facts = (
        Fact("semiflows_N", ((1, 1),), "stated"),
        Fact("theta_t1", Fraction(3, 2), "stated"),
        Fact("never_fires", frozenset({"t1"}), "stated"),
    )
    return Fixture("cs_threshold", net, {"m0": (1, 2)}, ("m0",), facts)


def producer() -> Fixture:
    """One place fed by one input-free transition: the simplest unbounded net."""
    net = Net.from_arcs("producer", ("p",), ("t",), {("t", "p"): 1})
    return Fixture("producer", net, {"q0": (0,)}, ("q0",), (Fact("bounded", False),))


def state_machine(name: str, n: int, edges: Sequence[tuple[int, int]]) -> Net:
    """Places q0..q{n-1}; one transition ``e{s}_{d}`` per edge."""
    places = tuple(f"q{k}" for k in range(n))
    names = tuple(f"e{s}_{d}" for s, d in edges)
    arcs = {}
    for t, (s, d) in zip(names, edges):
        arcs[(f"q{s}", t)] = 1
        arcs[(t, f"q{d}")] = 1
    return Net.from_arcs(name, places, names, arcs)


def unit(n: int, k: int) -> Vector:
    return tuple(int(j == k) for j in range(n))


HOME_SPACE_SETS = {
    "H1": (3, 5, 6),
    "H2": (3, 7),
    "H3": (3, 5, 7),
    "H4": (1, 3, 5),
}

HOME_SPACE_EDGES = ((0, 2), (1, 4), (2, 3), (2, 6), (4, 1), (5, 7), (6, 5), (7, 5))


def home_space_checks(net: Net) -> dict[str, bool]:
    """Every required property of the 8-state home-space example.

    Markings are the unit vectors; Init = {q0, q1}.
    """
    n = net.d
    units = lambda ks: MarkingSet.of(unit(n, k) for k in ks)
    from_init = build_rg(net, [unit(n, 0), unit(n, 1)])
    from_q2 = build_rg(net, [unit(n, 2)])
    if not (from_init.complete and from_q2.complete):
        return {"complete": False}
    yes = lambda rg, ks: is_home_space(rg, units(ks)).status == "yes"
    out = {f"{h} from q2": yes(from_q2, ks) for h, ks in HOME_SPACE_SETS.items() if h != "H4"}
    out.update({f"{h} not from Init": not yes(from_init, ks)
                for h, ks in HOME_SPACE_SETS.items() if h != "H4"})
    out["H4 from Init"] = yes(from_init, HOME_SPACE_SETS["H4"])
    out["no Init home state"] = home_states(from_init) == ()
    out["H1&H2 not from q2"] = not yes(from_q2, (3,))
    out["H1&H3 from q2"] = yes(from_q2, (3, 5))
    out["all reachable"] = len(from_init.nodes) == n
    return out


def home_space_machine(edges: Sequence[tuple[int, int]] = HOME_SPACE_EDGES) -> Fixture:
    net = state_machine("home_spaces", 8, edges)
    failed = [k for k, ok in home_space_checks(net).items() if not ok]
    _require(not failed, f"state machine witness fails: {failed}")
    markings = {f"q{k}": unit(8, k) for k in range(8)}
    facts = tuple(Fact(k, frozenset(f"q{j}" for j in ks), "stated") for k, ks in HOME_SPACE_SETS.items())
    return Fixture("home_spaces", net, markings, ("q0", "q1"), facts)


def search_state_machine_witness(seed: int = 0, attempts: int = 200_000) -> tuple[tuple[int, int], ...] | None:
    """Seeded random search for an edge set passing :func:`home_space_checks`.

    Each state gets one or two successors, self-loops dropped.
    """
    rng = random.Random(seed)
    for _ in range(attempts):
        edges = []
        for s in range(8):
            for d in rng.sample(range(8), rng.choice((1, 1, 2))):
                if d != s:
                    edges.append((s, d))
        net = state_machine("home_spaces", 8, edges)
        checks = home_space_checks(net)
        if all(checks.values()):
            return tuple(edges)
    return None


# -- a live net whose initial marking is not a home state -------------------------

HS_PLACES = ("A", "B", "C", "D", "E", "F")
HS_Q0 = (1, 1, 0, 0, 0, 1)
HS_QC = (0, 0, 1, 1, 1, 1)


def live_home_state_checks(net: Net, q0: Vector = HS_Q0, qc: Vector = HS_QC) -> dict[str, bool]:
    rg = build_rg(net, [q0], cap=10_000)
    if not rg.complete:
        return {"complete": False}
    hs = home_states(rg)
    live = live_transitions_exact(rg)
    out = {
        "q0 not a home state": q0 not in hs,
        "qc a home state": qc in hs,
        "all transitions live": live == frozenset(net.transitions),
    }
    if qc in rg.index:
        seen = reachable_from(rg, rg.roots[0], lambda t: t in live)
        out["live path q0 to qc"] = rg.index[qc] in seen
    else:
        out["live path q0 to qc"] = False
    return out


def live_home_net() -> Fixture:
    """A live net where q0 = {A, B, F} is not a home state but
    qc = {C, D, E, F} is.

    Two cyclic components: A splits into C + D and merges back, B moves to
    E and back.  Merging needs E and returning to B needs C, so once the
    initial combination (A and B both marked) is left it never comes back,
    while every transition keeps firing forever.
    """
    net = Net.from_arcs("live_home", HS_PLACES, ("split", "merge", "go", "back"), {
        ("A", "split"): 1, ("F", "split"): 1,
        ("split", "C"): 1, ("split", "D"): 1, ("split", "F"): 1,
        ("C", "merge"): 1, ("D", "merge"): 1, ("E", "merge"): 1,
        ("merge", "A"): 1, ("merge", "E"): 1,
        ("B", "go"): 1, ("go", "E"): 1,
        ("E", "back"): 1, ("C", "back"): 1, ("back", "B"): 1, ("back", "C"): 1,
    })
    failed = [k for k, ok in live_home_state_checks(net).items() if not ok]
    _require(not failed, f"home state witness fails: {failed}")
    facts = (
        Fact("live", True, "stated"),
        Fact("q0_home_state", False, "stated"),
        Fact("qc_home_state", True, "stated"),
    )
    return Fixture("live_home", net, {"q0": HS_Q0, "qc": HS_QC}, ("q0",), facts)


def state_machine_restriction_holds(net: Net, q0: Sequence[int], cap: int = 10_000) -> bool | None:
    """On a state machine: if q0 is not a home state but some home state h
    exists, every path q0 ->* h uses a non-live transition.

    None when the graph is truncated.
    """
    rg = build_rg(net, [q0], cap)
    if not rg.complete:
        return None
    hs = home_states(rg)
    q0 = tuple(q0)
    if not hs or q0 in hs:
        return True
    live = live_transitions_exact(rg)
    seen = reachable_from(rg, rg.roots[0], lambda t: t in live)
    return not any(rg.index[h] in seen for h in hs)


# -- collections and export ---------------------------------------------------------

def all_fixtures() -> list[Fixture]:
    return [
        tn(2, 5, 0), tn(2, 4, 0), tn(3, 7, 0), tn(3, 2, 0), tn(1, 9, 3),
        tned(3, 4, 1), tned(2, 1, 0), tned(3, 3, 0),
        fq_inv_net(), threshold_net(), home_space_machine(),
        live_home_net(), producer(),
    ]


EXPORTS = {
    "tn2.net": lambda: tn(2, 5, 0),
    "tn3.net": lambda: tn(3, 7, 0),
    "tned3.net": lambda: tned(3, 4, 1),
    "fq_inv.net": fq_inv_net,
    "cs_threshold.net": threshold_net,
    "home_spaces.net": home_space_machine,
    "live_home.net": live_home_net,
    "producer.net": producer,
}


def export_fixtures(directory: str | Path, names: Iterable[str] | None = None) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for fname in names or EXPORTS:
        fx = EXPORTS[fname]()
        path = directory / fname
        path.write_text(fx.text())
        out.append(path)
    return out
