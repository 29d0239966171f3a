"""Invariant-derived bounds: level sets, ω, λ, θ, structural boundedness.

Bounds are exact :class:`fractions.Fraction` values.  A bound with no
covering semiflow is *undefined* (``value is None``), which is distinct
from every number.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Sequence

from petristruct.linalg import Vector, dot
from petristruct.net import Net, NetError, classify, incidence
from petristruct.semiflows import GeneratingSet, Ring, farkas, hilbert_basis, is_semiflow

DEFAULT_CAP = 100_000


@dataclass(frozen=True)
class LinearLevelSet:
    """``H(f, q) = {q' | f.q' = f.q}``."""

    f: Vector
    level: int

    def contains(self, q: Sequence[int]) -> bool:
        return dot(self.f, q) == self.level


def level_set(net: Net, f: Sequence[int], q: Sequence[int]) -> LinearLevelSet:
    f = tuple(f)
    q = net.check_marking(q)
    if len(f) != net.d:
        raise NetError("weight vector and net dimensions differ")
    return LinearLevelSet(f, dot(f, q))


def level_set_contains(H: LinearLevelSet, q: Sequence[int]) -> bool:
    return H.contains(q)


@dataclass(frozen=True)
class OmegaSystem:
    """Intersection of the level sets of every generator through ``anchor``."""

    rows: tuple[tuple[Vector, int], ...]
    anchor: Vector

    def contains(self, q: Sequence[int]) -> bool:
        return all(dot(e, q) == level for e, level in self.rows)


def omega(gens: GeneratingSet, q0: Sequence[int]) -> OmegaSystem:
    """ω(q0) described by one equation per generator.

    Any generating set of ℱ⁺ over ℕ, ℚ⁺ or ℚ gives the same set; with an
    empty generating set every marking is a member.
    """
    q0 = gens.net.check_marking(q0)
    return OmegaSystem(tuple((e, dot(e, q0)) for e in gens.elements), q0)


@dataclass(frozen=True)
class RationalBound:
    value: Fraction | None
    kind: str
    subject: str
    anchor: Vector

    @property
    def defined(self) -> bool:
        return self.value is not None

    def __str__(self) -> str:
        return "undefined" if self.value is None else fraction_text(self.value)


def fraction_text(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _require_nonneg_ring(gens: GeneratingSet, what: str) -> None:
    if gens.ring not in (Ring.N, Ring.QPLUS):
        raise NetError(f"{what} needs a generating set over N or Q+")


def lambda_bound(gens: GeneratingSet, p: str, q0: Sequence[int]) -> RationalBound:
    """λ(p, q0) = min over generators covering p of ``e.q0 / e(p)``."""
    _require_nonneg_ring(gens, "lambda")
    net = gens.net
    i = net.place_index(p)
    q0 = net.check_marking(q0)
    ratios = [Fraction(dot(e, q0), e[i]) for e in gens.elements if e[i] != 0]
    return RationalBound(min(ratios) if ratios else None, "lambda", p, q0)


def marking_bound(bound: RationalBound) -> int | None:
    """Floored λ: a certified upper bound on the tokens of the place."""
    return None if bound.value is None else floor(bound.value)


def theta(gens: GeneratingSet, t: str, q0: Sequence[int]) -> RationalBound:
    """θ(t, q0) = min over generators of ``e.q0 / e.Pre(., t)``.

    θ < 1 proves t never fires from q0; θ ≥ 1 proves nothing.
    """
    _require_nonneg_ring(gens, "theta")
    net = gens.net
    pre = net.pre_of(t)
    q0 = net.check_marking(q0)
    ratios = []
    for e in gens.elements:
        threshold = dot(e, pre)
        if threshold:
            ratios.append(Fraction(dot(e, q0), threshold))
    return RationalBound(min(ratios) if ratios else None, "theta", t, q0)


def prune_dead_by_threshold(gens: GeneratingSet, q0: Sequence[int]) -> frozenset[str]:
    """Transitions certified never firable from q0 (θ < 1)."""
    dead = set()
    for t in gens.net.transitions:
        th = theta(gens, t, q0).value
        if th is not None and th < 1:
            dead.add(t)
    return frozenset(dead)


@dataclass(frozen=True)
class InvariantVerdict:
    """``status`` is ``holds``, ``violated`` or ``inconclusive``."""

    status: str
    witness: Vector | None = None
    explored: int = 0


def fq_invariant_holds(net: Net, f: Sequence[int], q: Sequence[int],
                       cap: int = DEFAULT_CAP) -> InvariantVerdict:
    """Whether ``f.q' = f.q`` on every marking reachable from q.

    Semiflows hold by construction; anything else is checked by a
    breadth-first exploration of at most ``cap`` markings.
    """
    f = tuple(f)
    q = net.check_marking(q)
    if len(f) != net.d:
        raise NetError("weight vector and net dimensions differ")
    if is_semiflow(net, f):
        return InvariantVerdict("holds")
    level = dot(f, q)
    seen = {q}
    queue = deque([q])
    cols = list(zip(net.pre_columns, net.delta_columns))
    while queue:
        cur = queue.popleft()
        for pre, delta in cols:
            if any(x < w for x, w in zip(cur, pre)):
                continue
            nxt = tuple(x + dx for x, dx in zip(cur, delta))
            if nxt in seen:
                continue
            if dot(f, nxt) != level:
                return InvariantVerdict("violated", nxt, len(seen))
            if len(seen) >= cap:
                return InvariantVerdict("inconclusive", None, len(seen))
            seen.add(nxt)
            queue.append(nxt)
    return InvariantVerdict("holds", None, len(seen))


def differential_form(f: Sequence[int], q: Sequence[int]) -> tuple[int, int]:
    """Weighted tokens on the positive support and on the negative support.

    Their difference is ``f.q``.
    """
    pos = sum(w * x for w, x in zip(f, q) if w > 0)
    neg = sum(-w * x for w, x in zip(f, q) if w < 0)
    return pos, neg


# -- structural boundedness ------------------------------------------------------

def _slack_system(net: Net) -> list[list[int]]:
    # rows: places then one slack per transition; f.C + s = 0 <=> f.Post <= f.Pre
    C = incidence(net)
    m = len(net.transitions)
    rows = [list(C[i]) for i in range(net.d)]
    rows += [[int(j == k) for k in range(m)] for j in range(m)]
    return rows


def structurally_bounded_places(net: Net) -> frozenset[str]:
    """Places covered by some ``f ≥ 0`` with ``f.Post(., t) ≤ f.Pre(., t)``."""
    rows = _slack_system(net)
    covered = set()
    for x in farkas(rows, len(rows)):
        covered.update(i for i in range(net.d) if x[i])
    return frozenset(net.places[i] for i in sorted(covered))


def is_structurally_bounded(net: Net) -> bool:
    return len(structurally_bounded_places(net)) == net.d


def implicit_places(net: Net, q0: Sequence[int]) -> frozenset[str]:
    """Places p with an integer semiflow f such that f(p) = -1 is the only
    negative coordinate, some coordinate is positive, and ``f.q0 = 0``.

    The search is exact: each place is checked against the minimal
    non-negative solutions of a system where the coordinate of p is
    replaced by a scale variable s, and a solution with s = 1 is sought.
    """
    if not classify(net).ordinary:
        raise NetError("implicit places are defined for ordinary nets only")
    q0 = net.check_marking(q0)
    C = incidence(net)
    found = set()
    for pi in range(net.d):
        rows = []
        for p in range(net.d):
            sign = -1 if p == pi else 1
            rows.append([sign * c for c in C[p]] + [sign * q0[p]])
        basis = hilbert_basis(rows, net.d)
        with_scale = [h for h in basis if h[pi] == 1]
        others = [h for h in basis if h[pi] == 0]
        if any(any(h[p] for p in range(net.d) if p != pi) for h in with_scale) or \
                (with_scale and others):
            found.add(net.places[pi])
    return frozenset(found)
