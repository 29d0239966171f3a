"""Karp-Miller coverability trees and liveness verdicts.

Extended markings use ``math.inf`` for ω, so ω ± n = ω and ω ≥ n come for
free from float arithmetic and the usual tuple code works unchanged.

Liveness from a home state h: a transition is live iff it labels an edge
of the coverability tree rooted at h.  :func:`liveness_report` combines
that with threshold pruning and the exact reachability-graph oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from petristruct.bounds import fraction_text, theta
from petristruct.graph import (
    DEFAULT_CAP,
    ReachGraph,
    as_query,
    build_rg,
    condense,
    home_states,
    is_home_space,
    live_transitions_exact,
    sink_labels,
)
from petristruct.net import Net, NetError
from petristruct.semiflows import minimal_support_semiflows

OMEGA = math.inf
DEFAULT_BUDGET = 200_000

ExtendedMarking = tuple


class TreeBudgetError(NetError):
    """The coverability tree grew past its node budget."""


def omega_text(q: Sequence) -> str:
    return "(" + ",".join("ω" if x == OMEGA else str(x) for x in q) + ")"


@dataclass(frozen=True)
class CoverNode:
    marking: ExtendedMarking
    parent: int | None
    label: str | None
    status: str  # interior, frontier or duplicate
    depth: int


@dataclass(frozen=True, eq=False)
class CoverTree:
    net: Net
    nodes: tuple[CoverNode, ...]

    @property
    def root(self) -> ExtendedMarking:
        return self.nodes[0].marking

    def edges(self) -> list[tuple[int, str, int]]:
        return [(n.parent, n.label, i) for i, n in enumerate(self.nodes) if n.parent is not None]

    def has_omega(self) -> bool:
        return any(OMEGA in n.marking for n in self.nodes)

    def to_dot(self) -> str:
        lines = [f'digraph "{self.net.name}_lct" {{']
        for i, n in enumerate(self.nodes):
            style = {"duplicate": ", style=dashed", "frontier": ", shape=box"}.get(n.status, "")
            lines.append(f'  n{i} [label="{omega_text(n.marking)}"{style}];')
        for s, t, d in self.edges():
            lines.append(f'  n{s} -> n{d} [label="{t}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _accelerate(m: list, ancestors: list[ExtendedMarking]) -> list:
    changed = True
    while changed:
        changed = False
        for a in ancestors:
            if a != tuple(m) and all(x <= y for x, y in zip(a, m)):
                for k, (x, y) in enumerate(zip(a, m)):
                    if y > x and y != OMEGA:
                        m[k] = OMEGA
                        changed = True
    return m


def build_lct(net: Net, q0: Sequence[int], max_nodes: int = DEFAULT_BUDGET) -> CoverTree:
    """Classical Karp-Miller tree, expanded depth-first in declaration order.

    A new node dominating a strict ancestor gets ω wherever it is larger;
    this is repeated until no ancestor adds an ω.  A node equal to one of
    its ancestors is kept as a ``duplicate`` leaf, a node with nothing
    enabled is a ``frontier`` leaf.
    """
    root = tuple(net.check_marking(q0))
    # f.q is the same at every node for a semiflow f, so an ancestor below
    # a node agrees with it on every place some semiflow covers: only
    # ancestors sharing that projection can trigger acceleration
    covered = sorted({i for f in minimal_support_semiflows(net) for i, x in enumerate(f) if x})
    key = lambda m: tuple(m[i] for i in covered)
    markings: list[ExtendedMarking] = [root]
    parents: list[int | None] = [None]
    labels: list[str | None] = [None]
    depths = [0]
    status: list[str] = [""]
    cols = list(zip(net.transitions, net.pre_columns, net.delta_columns))
    # the current branch, kept in step with the DFS; its markings are distinct
    on_path: set[ExtendedMarking] = set()
    buckets: dict[tuple, list[ExtendedMarking]] = {}
    stack = [(0, True)]
    while stack:
        i, entering = stack.pop()
        q = markings[i]
        if not entering:
            on_path.discard(q)
            buckets[key(q)].pop()
            continue
        if q in on_path:
            status[i] = "duplicate"
            continue
        on_path.add(q)
        buckets.setdefault(key(q), []).append(q)
        children = []
        for t, pre, delta in cols:
            if any(x < w for x, w in zip(q, pre)):
                continue
            m = [x + dx for x, dx in zip(q, delta)]
            m = _accelerate(m, buckets.get(key(m), ()))
            if len(markings) >= max_nodes:
                raise TreeBudgetError(f"coverability tree exceeded {max_nodes} nodes")
            markings.append(tuple(m))
            parents.append(i)
            labels.append(t)
            depths.append(depths[i] + 1)
            status.append("")
            children.append(len(markings) - 1)
        status[i] = "interior" if children else "frontier"
        stack.append((i, False))
        stack.extend((c, True) for c in reversed(children))
    nodes = tuple(CoverNode(m, p, l, s, d)
                  for m, p, l, s, d in zip(markings, parents, labels, status, depths))
    return CoverTree(net, nodes)


def lct_labels(tree: CoverTree) -> frozenset[str]:
    return frozenset(n.label for n in tree.nodes if n.label is not None)


def live_via_home_state(net: Net, h: Sequence[int], certificate: ReachGraph | None = None,
                        max_nodes: int = DEFAULT_BUDGET) -> frozenset[str]:
    """Live transitions, given that ``h`` is a home state.

    With a reachability graph as certificate, ``h`` must be one of its
    home states; without one the caller vouches for it.
    """
    h = net.check_marking(h)
    if certificate is not None and h not in home_states(certificate):
        raise NetError(f"{net.format_marking(h)} is not a home state of the given graph")
    return lct_labels(build_lct(net, h, max_nodes))


def live_by_home_space(rg: ReachGraph, H, t: str) -> bool | None:
    """True when H is a home space whose reachable members all enable t.

    None when this route proves nothing (H is not a home space, some
    reachable member of H disables t, or the graph is truncated).
    """
    verdict = is_home_space(rg, H)
    if verdict.status != "yes":
        return None
    H = as_query(H)
    pre = rg.net.pre_of(t)
    members = [q for q in rg.nodes if H.contains(q)]
    if all(all(x >= w for x, w in zip(q, pre)) for q in members):
        return True
    return None


# -- the report ----------------------------------------------------------------

LIVE = "live"
DEAD = "dead-never-fires"
NOT_LIVE = "not-live"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class TransitionVerdict:
    status: str
    evidence: str


@dataclass
class LivenessVerdict:
    transitions: dict[str, TransitionVerdict]
    rg_complete: bool
    states: int
    cap: int
    home_state: tuple | None = None
    assumed: bool = False
    contradiction: str | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def live(self) -> bool | None:
        """True if every transition is live, False if one is not, else None."""
        statuses = [v.status for v in self.transitions.values()]
        if any(s in (DEAD, NOT_LIVE) for s in statuses):
            return False
        if all(s == LIVE for s in statuses):
            return True
        return None

    def with_status(self, status: str) -> frozenset[str]:
        return frozenset(t for t, v in self.transitions.items() if v.status == status)


def liveness_report(net: Net, init: Iterable[Sequence[int]], cap: int = DEFAULT_CAP,
                    assume_home_state: Sequence[int] | None = None,
                    max_nodes: int = DEFAULT_BUDGET) -> LivenessVerdict:
    """Per-transition liveness for ``<net, init>``.

    Steps: threshold pruning; the reachability graph up to ``cap`` (exact
    verdicts when complete, cross-checked against the tree rooted at a
    home state); a caller-supplied home state when the graph is truncated;
    and otherwise only transitions absent from every tree are settled.
    """
    init = [net.check_marking(q) for q in init]
    if not init:
        raise ValueError("Init must be non-empty")
    gens = minimal_support_semiflows(net)
    dead: dict[str, str] = {}
    for t in net.transitions:
        values = [theta(gens, t, q) for q in init]
        if all(b.value is not None and b.value < 1 for b in values):
            dead[t] = "theta=" + ",".join(fraction_text(b.value) for b in values) + " < 1"

    rg = build_rg(net, init, cap)
    verdicts: dict[str, TransitionVerdict] = {}
    report = LivenessVerdict(verdicts, rg.complete, len(rg.nodes), cap)
    h_assumed = net.check_marking(assume_home_state) if assume_home_state is not None else None

    if rg.complete:
        live = live_transitions_exact(rg)
        fired = rg.labels()
        cond = condense(rg)
        per_sink = sink_labels(rg, cond)
        for t in net.transitions:
            if t in live:
                verdicts[t] = TransitionVerdict(LIVE, f"labels an edge in each of {len(per_sink)} sink components")
            elif t in dead:
                verdicts[t] = TransitionVerdict(DEAD, dead[t])
            elif t not in fired:
                verdicts[t] = TransitionVerdict(DEAD, f"no edge of the complete graph ({len(rg.nodes)} states)")
            else:
                k = next(k for k, labels in zip(cond.sinks, per_sink) if t not in labels)
                q = rg.nodes[cond.components[k][0]]
                verdicts[t] = TransitionVerdict(NOT_LIVE, f"never enabled after reaching {net.format_marking(q)}")
        hs = home_states(rg)
        if hs:
            h = hs[0]
            report.home_state = h
            try:
                by_tree = live_via_home_state(net, h, rg, max_nodes)
            except TreeBudgetError as exc:
                report.notes.append(f"cross-check skipped: {exc}")
            else:
                if by_tree != live:
                    report.contradiction = (f"coverability labels from {net.format_marking(h)} "
                                            f"disagree with the reachability graph")
        if h_assumed is not None:
            report.assumed = True
            if h_assumed not in hs:
                report.contradiction = (f"assumed home state {net.format_marking(h_assumed)} "
                                        f"is not a home state of the complete graph")
        return report

    report.notes.append(f"reachability graph truncated at {cap} states")
    if h_assumed is not None:
        report.home_state = h_assumed
        report.assumed = True
        try:
            labels = live_via_home_state(net, h_assumed, None, max_nodes)
        except TreeBudgetError as exc:
            report.notes.append(str(exc))
        else:
            where = net.format_marking(h_assumed)
            for t in net.transitions:
                if t in dead:
                    verdicts[t] = TransitionVerdict(DEAD, dead[t])
                elif t in labels:
                    verdicts[t] = TransitionVerdict(LIVE, f"labels the coverability tree from assumed home state {where}")
                else:
                    verdicts[t] = TransitionVerdict(NOT_LIVE, f"absent from the coverability tree from assumed home state {where}")
            return report

    fired_somewhere: set[str] = set()
    trees_ok = True
    for q in init:
        try:
            fired_somewhere |= lct_labels(build_lct(net, q, max_nodes))
        except TreeBudgetError as exc:
            report.notes.append(str(exc))
            trees_ok = False
            break
    for t in net.transitions:
        if t in dead:
            verdicts[t] = TransitionVerdict(DEAD, dead[t])
        elif trees_ok and t not in fired_somewhere:
            verdicts[t] = TransitionVerdict(DEAD, "absent from the coverability tree of every initial marking")
        else:
            verdicts[t] = TransitionVerdict(UNKNOWN, f"state cap {cap} reached")
    return report
