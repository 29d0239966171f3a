"""Reachability graphs, SCC condensation, home spaces and home states.

All verdicts need the full reachability set.  A graph truncated by the
state cap is flagged ``complete=False`` and every verdict that depends on
sink components comes back inconclusive (or raises, for operations that
return plain values).
"""

from __future__ import annotations

import operator
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Protocol, Sequence

from petristruct.linalg import Vector
from petristruct.net import Net, NetError

DEFAULT_CAP = 100_000


class IncompleteGraphError(NetError):
    """The reachability graph was truncated; the question is undecided."""


@dataclass(frozen=True, eq=False)
class ReachGraph:
    net: Net
    nodes: tuple[Vector, ...]
    edges: tuple[tuple[int, str, int], ...]
    roots: tuple[int, ...]
    complete: bool
    cap: int

    @cached_property
    def index(self) -> dict[Vector, int]:
        return {q: i for i, q in enumerate(self.nodes)}

    @cached_property
    def successors(self) -> tuple[tuple[tuple[str, int], ...], ...]:
        out: list[list[tuple[str, int]]] = [[] for _ in self.nodes]
        for s, t, d in self.edges:
            out[s].append((t, d))
        return tuple(tuple(x) for x in out)

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.nodes]
        for s, _, d in self.edges:
            out[d].append(s)
        return tuple(tuple(x) for x in out)

    def labels(self) -> frozenset[str]:
        return frozenset(t for _, t, _ in self.edges)

    def require_complete(self, what: str) -> None:
        if not self.complete:
            raise IncompleteGraphError(
                f"{what}: reachability graph truncated at {self.cap} states")

    def to_dot(self) -> str:
        lines = [f'digraph "{self.net.name}" {{']
        roots = set(self.roots)
        for i, q in enumerate(self.nodes):
            shape = ', shape=doublecircle' if i in roots else ''
            lines.append(f'  n{i} [label="({",".join(map(str, q))})"{shape}];')
        for s, t, d in self.edges:
            lines.append(f'  n{s} -> n{d} [label="{t}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_rg(net: Net, init: Iterable[Sequence[int]], cap: int = DEFAULT_CAP) -> ReachGraph:
    """Breadth-first reachability graph from ``init`` with at most ``cap`` nodes.

    Node numbering follows BFS order, roots first, with transitions tried in
    declaration order, so two runs on the same input give the same graph.
    """
    if cap <= 0:
        raise ValueError("state cap must be positive")
    roots_q = [net.check_marking(q) for q in init]
    if not roots_q:
        raise ValueError("Init must be non-empty")
    index: dict[Vector, int] = {}
    nodes: list[Vector] = []
    roots: list[int] = []
    for q in roots_q:
        if q not in index:
            if len(nodes) == cap:
                raise ValueError("state cap is smaller than the Init set")
            index[q] = len(nodes)
            nodes.append(q)
        if index[q] not in roots:
            roots.append(index[q])
    edges: list[tuple[int, str, int]] = []
    queue = deque(range(len(nodes)))
    complete = True
    cols = list(zip(net.transitions, net.pre_columns, net.delta_columns))
    while queue:
        i = queue.popleft()
        q = nodes[i]
        for t, pre, delta in cols:
            if any(x < w for x, w in zip(q, pre)):
                continue
            q2 = tuple(x + dx for x, dx in zip(q, delta))
            j = index.get(q2)
            if j is None:
                if len(nodes) >= cap:
                    complete = False
                    continue
                j = index[q2] = len(nodes)
                nodes.append(q2)
                queue.append(j)
            edges.append((i, t, j))
    return ReachGraph(net, tuple(nodes), tuple(edges), tuple(roots), complete, cap)


# -- strongly connected components ----------------------------------------------

@dataclass(frozen=True)
class Condensation:
    """SCCs numbered by their smallest node index."""

    scc_of: tuple[int, ...]
    components: tuple[tuple[int, ...], ...]
    dag_edges: frozenset[tuple[int, int]]
    sinks: tuple[int, ...]


def tarjan(n: int, successors: Callable[[int], Iterable[int]]) -> list[list[int]]:
    """Iterative Tarjan; components in reverse topological order."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(successors(w))))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def condense(rg: ReachGraph) -> Condensation:
    succ = rg.successors
    comps = tarjan(len(rg.nodes), lambda v: [d for _, d in succ[v]])
    comps = sorted((sorted(c) for c in comps), key=lambda c: c[0])
    scc_of = [0] * len(rg.nodes)
    for k, comp in enumerate(comps):
        for v in comp:
            scc_of[v] = k
    dag = frozenset((scc_of[s], scc_of[d]) for s, _, d in rg.edges if scc_of[s] != scc_of[d])
    has_out = {a for a, _ in dag}
    sinks = tuple(k for k in range(len(comps)) if k not in has_out)
    return Condensation(tuple(scc_of), tuple(tuple(c) for c in comps), dag, sinks)


# -- home-space queries -------------------------------------------------------

class HomeSpaceQuery(Protocol):
    def contains(self, q: Sequence[int]) -> bool: ...


@dataclass(frozen=True)
class MarkingSet:
    """An explicit finite set of markings."""

    markings: frozenset[Vector]

    @classmethod
    def of(cls, markings: Iterable[Sequence[int]]) -> MarkingSet:
        return cls(frozenset(tuple(q) for q in markings))

    def contains(self, q: Sequence[int]) -> bool:
        return tuple(q) in self.markings

    def __or__(self, other: MarkingSet) -> MarkingSet:
        return MarkingSet(self.markings | other.markings)

    def __and__(self, other: MarkingSet) -> MarkingSet:
        return MarkingSet(self.markings & other.markings)


_OPS = {"=": operator.eq, "==": operator.eq, "!=": operator.ne,
        "<=": operator.le, ">=": operator.ge, "<": operator.lt, ">": operator.gt}


@dataclass(frozen=True)
class Predicate:
    """Conjunction of coordinate comparisons ``place op constant``."""

    net: Net
    atoms: tuple[tuple[int, str, int], ...]

    @classmethod
    def parse(cls, net: Net, text: str) -> Predicate:
        atoms = []
        for part in re.split(r"\s+and\s+|\s*&&?\s*", text.strip()):
            m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*(==|=|!=|<=|>=|<|>)\s*(\d+)\s*", part)
            if m is None:
                raise NetError(f"cannot parse comparison {part!r}")
            atoms.append((net.place_index(m.group(1)), m.group(2), int(m.group(3))))
        return cls(net, tuple(atoms))

    def contains(self, q: Sequence[int]) -> bool:
        return all(_OPS[op](q[i], c) for i, op, c in self.atoms)

    def __str__(self) -> str:
        return " and ".join(f"{self.net.places[i]}{op}{c}" for i, op, c in self.atoms)


@dataclass(frozen=True)
class FunctionQuery:
    """Membership given by an arbitrary predicate on markings."""

    fn: Callable[[Vector], bool]

    def contains(self, q: Sequence[int]) -> bool:
        return bool(self.fn(tuple(q)))


def as_query(H) -> HomeSpaceQuery:
    if hasattr(H, "contains"):
        return H
    if callable(H):
        return FunctionQuery(H)
    return MarkingSet.of(H)


@dataclass(frozen=True)
class HomeSpaceVerdict:
    """``status`` is one of ``yes``, ``no``, ``inconclusive``.

    For ``no`` the witness is a sink component (as markings) disjoint from H.
    """

    status: str
    witness: tuple[Vector, ...] = ()

    def __bool__(self) -> bool:
        return self.status == "yes"


def is_home_space(rg: ReachGraph, H) -> HomeSpaceVerdict:
    """Decide whether H is an Init-home space via the sink components.

    H is a home space iff it meets every sink SCC of the graph; membership
    is only ever evaluated on sink members, so H may be infinite.
    """
    if not rg.complete:
        return HomeSpaceVerdict("inconclusive")
    H = as_query(H)
    cond = condense(rg)
    for k in cond.sinks:
        members = cond.components[k]
        if not any(H.contains(rg.nodes[v]) for v in members):
            return HomeSpaceVerdict("no", tuple(rg.nodes[v] for v in members))
    return HomeSpaceVerdict("yes")


def brute_force_home_space(rg: ReachGraph, H) -> bool:
    """Definition-level check: every reachable marking can reach H.

    Computed as ``RS ⊆ RS⁻¹(H)`` by a backward search from the members of
    H; no component structure is used.
    """
    rg.require_complete("brute_force_home_space")
    H = as_query(H)
    seen = [False] * len(rg.nodes)
    queue = deque(i for i, q in enumerate(rg.nodes) if H.contains(q))
    for i in queue:
        seen[i] = True
    pred = rg.predecessors
    while queue:
        v = queue.popleft()
        for u in pred[v]:
            if not seen[u]:
                seen[u] = True
                queue.append(u)
    return all(seen)


def home_states(rg: ReachGraph) -> tuple[Vector, ...]:
    """Init-home states: the unique sink SCC, or nothing if there are several."""
    rg.require_complete("home_states")
    cond = condense(rg)
    if len(cond.sinks) != 1:
        return ()
    return tuple(rg.nodes[v] for v in cond.components[cond.sinks[0]])


def is_strongly_connected(rg: ReachGraph) -> bool:
    rg.require_complete("is_strongly_connected")
    return len(condense(rg).components) == 1


def initial_is_home_state(rg: ReachGraph) -> bool:
    """Whether the single initial marking is a home state.

    Always equal to :func:`is_strongly_connected` on the same graph.
    """
    if len(rg.roots) != 1:
        raise NetError("initial_is_home_state needs a single initial marking")
    q0 = rg.nodes[rg.roots[0]]
    result = q0 in home_states(rg)
    assert result == is_strongly_connected(rg)
    return result


def sink_labels(rg: ReachGraph, cond: Condensation | None = None) -> list[frozenset[str]]:
    """Transition labels occurring inside each sink component."""
    cond = cond or condense(rg)
    out = []
    for k in cond.sinks:
        labels = set()
        for v in cond.components[k]:
            labels.update(t for t, _ in rg.successors[v])
        out.append(frozenset(labels))
    return out


def live_transitions_exact(rg: ReachGraph) -> frozenset[str]:
    """Transitions labelling an edge inside every sink SCC.

    On a complete graph this is exactly the set of live transitions: every
    run ends up in some sink component and stays there.
    """
    rg.require_complete("live_transitions_exact")
    per_sink = sink_labels(rg)
    live = set(rg.net.transitions)
    for labels in per_sink:
        live &= labels
    return frozenset(live)


def reachable_from(rg: ReachGraph, start: int, allowed: Callable[[str], bool] | None = None) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for t, w in rg.successors[v]:
            if w not in seen and (allowed is None or allowed(t)):
                seen.add(w)
                queue.append(w)
    return seen
