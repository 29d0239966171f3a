"""Semiflows: place weightings ``f`` with ``f^T (Post - Pre) = 0``.

Three generating sets are computed here:

* :func:`z_flow_basis` -- a ℤ-basis of the lattice of integer semiflows;
* :func:`minimal_support_semiflows` -- one semiflow per minimal support,
  by Farkas elimination with support pruning (a generating set over ℚ⁺);
* :func:`nonneg_generating_set` -- every ≤-minimal non-negative semiflow,
  by the Contejean-Devie completion procedure (the unique minimal
  generating set over ℕ).

Minimal-support semiflows are not enough over ℕ: for ``a + b = 2c`` the
minimal supports give (2,0,1) and (0,2,1) but (1,1,1) is ≤-minimal as well
and is not an ℕ-combination of them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from petristruct.linalg import Vector, dot, integer_left_kernel, leq, primitive, rank, solve_rational
from petristruct.net import Net, NetError, incidence


class Ring(str, enum.Enum):
    Z = "Z"
    QPLUS = "Q+"
    N = "N"


def is_semiflow(net: Net, v: Sequence[int]) -> bool:
    if len(v) != net.d:
        raise NetError(f"vector has length {len(v)}, net has {net.d} places")
    return all(dot(v, delta) == 0 for delta in net.delta_columns)


@dataclass(frozen=True)
class GeneratingSet:
    """Semiflows of ``net`` generating ℱ (ring Z) or ℱ⁺ (rings Q+ and N).

    ``minimal`` flags that every element is a ≤-minimal semiflow,
    ``minimal_support`` that every element has a minimal support.
    """

    net: Net
    elements: tuple[Vector, ...]
    ring: Ring
    minimal: bool = False
    minimal_support: bool = False

    def __post_init__(self) -> None:
        elements = tuple(tuple(int(x) for x in e) for e in self.elements)
        object.__setattr__(self, "elements", elements)
        if len(set(elements)) != len(elements):
            raise NetError("generating set elements must be pairwise distinct")
        for e in elements:
            if not any(e):
                raise NetError("the zero vector is not a generator")
            if not is_semiflow(self.net, e):
                raise NetError(f"{e} is not a semiflow")
            if self.ring is not Ring.Z and min(e) < 0:
                raise NetError(f"{e} has a negative coordinate")

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def with_elements(self, extra: Iterable[Sequence[int]]) -> GeneratingSet:
        """Same ring, more generators; minimality flags are dropped."""
        elems = list(self.elements)
        for e in extra:
            e = tuple(e)
            if e not in elems:
                elems.append(e)
        return GeneratingSet(self.net, tuple(elems), self.ring)

    def tableau(self) -> str:
        """Places as columns, one semiflow per row."""
        header = list(self.net.places)
        body = [[str(x) for x in e] for e in self.elements]
        widths = [max([len(h)] + [len(r[i]) for r in body]) for i, h in enumerate(header)]
        lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
        lines += ["  ".join(x.rjust(w) for x, w in zip(r, widths)) for r in body]
        return "\n".join(lines)


def z_flow_basis(net: Net) -> GeneratingSet:
    """Hermite-normal-form basis of the integer left kernel of ``Post - Pre``.

    Every element has coordinate gcd 1 and a positive leading coordinate.
    """
    basis = integer_left_kernel(incidence(net), net.d)
    return GeneratingSet(net, tuple(sorted(basis)), Ring.Z)


# -- Farkas elimination (minimal supports) ---------------------------------

def _support(v: Sequence[int]) -> frozenset[int]:
    return frozenset(i for i, x in enumerate(v) if x)


def _prune_supports(rows: list[tuple[list[int], Vector]]) -> list[tuple[list[int], Vector]]:
    supports = [_support(x) for _, x in rows]
    out = []
    seen = set()
    for k, (c, x) in enumerate(rows):
        s = supports[k]
        if any(s2 < s for s2 in supports):
            continue
        key = (tuple(c), x)
        if key in seen:
            continue
        seen.add(key)
        out.append((c, x))
    return out


def farkas(matrix: Sequence[Sequence[int]], nvars: int) -> list[Vector]:
    """Minimal-support non-negative solutions of ``x^T matrix = 0``.

    ``matrix`` has ``nvars`` rows.  Each returned vector is primitive; the
    list is sorted lexicographically.
    """
    ncols = len(matrix[0]) if nvars and matrix else 0
    rows = [(list(matrix[i]), tuple(int(i == j) for j in range(nvars))) for i in range(nvars)]
    for c in range(ncols):
        keep = [r for r in rows if r[0][c] == 0]
        pos = [r for r in rows if r[0][c] > 0]
        neg = [r for r in rows if r[0][c] < 0]
        for cp, xp in pos:
            for cn, xn in neg:
                a, b = cp[c], -cn[c]
                comb = [b * u + a * v for u, v in zip(cp, cn)] + [b * u + a * v for u, v in zip(xp, xn)]
                comb = primitive(comb)
                keep.append((list(comb[:ncols]), tuple(comb[ncols:])))
        rows = _prune_supports(keep)
    sols = {primitive(x) for _, x in rows}
    sols = [s for s in sols if not any(_support(t) < _support(s) for t in sols)]
    return sorted(sols)


# -- Contejean-Devie completion (all ≤-minimal solutions) ------------------

def hilbert_basis(matrix: Sequence[Sequence[int]], nvars: int,
                  max_frontier: int = 2_000_000) -> list[Vector]:
    """All ≤-minimal non-zero ``x ≥ 0`` with ``x^T matrix = 0``, sorted.

    Breadth-first completion: a candidate ``x`` with defect ``D = x^T M``
    is extended by unit ``e_j`` only when ``D . M_j < 0``, and dropped once
    it dominates a solution already found.
    """
    ncols = len(matrix[0]) if nvars and matrix else 0
    cols = [tuple(matrix[j]) for j in range(nvars)]
    if ncols == 0:
        return sorted(tuple(int(i == j) for j in range(nvars)) for i in range(nvars))
    frontier: dict[Vector, Vector] = {}
    for j in range(nvars):
        frontier[tuple(int(i == j) for i in range(nvars))] = cols[j]
    solutions: list[Vector] = []
    while frontier:
        pending = []
        for x, defect in frontier.items():
            if any(defect):
                pending.append((x, defect))
            else:
                solutions.append(x)
        nxt: dict[Vector, Vector] = {}
        for x, defect in pending:
            for j in range(nvars):
                if dot(defect, cols[j]) >= 0:
                    continue
                y = x[:j] + (x[j] + 1,) + x[j + 1:]
                if y in nxt:
                    continue
                if any(leq(s, y) for s in solutions):
                    continue
                nxt[y] = tuple(a + b for a, b in zip(defect, cols[j]))
        if len(nxt) > max_frontier:
            raise RuntimeError("Hilbert basis frontier exceeded its budget")
        frontier = nxt
    return sorted(solutions)


def nonneg_generating_set(net: Net) -> GeneratingSet:
    """Every minimal semiflow of ℱ⁺: the minimal generating set over ℕ."""
    elems = hilbert_basis(incidence(net), net.d)
    return GeneratingSet(net, tuple(elems), Ring.N, minimal=True)


def minimal_support_semiflows(net: Net) -> GeneratingSet:
    """The minimal semiflow of each minimal support (a ℚ⁺ generating set)."""
    elems = farkas(incidence(net), net.d)
    return GeneratingSet(net, tuple(elems), Ring.QPLUS, minimal=True, minimal_support=True)


# -- supports ----------------------------------------------------------------

@dataclass(frozen=True)
class SupportSplit:
    support: frozenset
    positive: frozenset
    negative: frozenset


def support_split(v: Sequence[int], places: Sequence[str] | None = None) -> SupportSplit:
    """Support of ``v`` split by sign; members are place names if given."""
    names = list(places) if places is not None else list(range(len(v)))
    pos = frozenset(n for n, x in zip(names, v) if x > 0)
    neg = frozenset(n for n, x in zip(names, v) if x < 0)
    return SupportSplit(pos | neg, pos, neg)


def minimal_supports(gens: GeneratingSet) -> dict[frozenset[str], Vector]:
    """Inclusion-minimal supports, each with its unique minimal semiflow.

    ``gens`` must be the full set of minimal semiflows over ℕ.
    """
    if gens.ring is not Ring.N:
        raise NetError("minimal_supports needs the minimal generating set over N")
    places = gens.net.places
    supp = {e: support_split(e, places).support for e in gens.elements}
    out = {}
    for e in gens.elements:
        s = supp[e]
        if not any(t < s for t in supp.values()):
            out[s] = e
    return out


# -- decompositions ------------------------------------------------------------

@dataclass(frozen=True)
class DecompositionResult:
    coefficients: tuple
    residual: Vector

    @property
    def exact(self) -> bool:
        return not any(self.residual)


def _check_nonneg_semiflow(net: Net, f: Sequence[int]) -> Vector:
    f = tuple(f)
    if not is_semiflow(net, f):
        raise NetError(f"{f} is not a semiflow")
    if min(f, default=0) < 0:
        raise NetError(f"{f} has a negative coordinate")
    return f


def decompose_over_N(f: Sequence[int], gens: GeneratingSet) -> DecompositionResult:
    """Greedy decomposition ``r_i = r_{i-1} - k_i e_i`` in generator order.

    Each ``k_i`` is the largest natural keeping the residual non-negative.
    With every minimal semiflow among the generators the residual is 0.
    """
    r = list(_check_nonneg_semiflow(gens.net, f))
    ks = []
    for e in gens.elements:
        k = min(x // w for x, w in zip(r, e) if w > 0)
        if k:
            r = [x - k * w for x, w in zip(r, e)]
        ks.append(k)
    return DecompositionResult(tuple(ks), tuple(r))


def decompose_over_Qplus(net: Net, f: Sequence[int],
                         reps: Sequence[Sequence[int]]) -> DecompositionResult:
    """Non-negative rational ``alpha`` with ``sum(alpha_i * reps_i) == f``.

    Exhaustive search over linearly independent subsets of ``reps`` in
    increasing size; a non-negative solution, when one exists, has such a
    support.  Coefficients are :class:`fractions.Fraction`.
    """
    f = _check_nonneg_semiflow(net, f)
    reps = [tuple(g) for g in reps]
    fsupp = _support(f)
    for g in reps:
        if not is_semiflow(net, g) or min(g, default=0) < 0 or not any(g):
            raise NetError(f"{g} is not a non-zero non-negative semiflow")
        if not _support(g) <= fsupp:
            raise NetError(f"support of {g} is not included in the support of {f}")
    if not any(f):
        return DecompositionResult(tuple(Fraction(0) for _ in reps), f)
    for size in range(1, len(reps) + 1):
        for idx in combinations(range(len(reps)), size):
            cols = [reps[i] for i in idx]
            if rank(cols) < size:
                continue
            x = solve_rational(cols, f)
            if x is None or min(x) < 0:
                continue
            alpha = [Fraction(0)] * len(reps)
            for i, a in zip(idx, x):
                alpha[i] = a
            return DecompositionResult(tuple(alpha), (0,) * net.d)
    raise NetError(f"{f} is not a non-negative combination of the given semiflows")
