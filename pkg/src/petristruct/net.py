"""Place/transition nets: data model, firing rule, state equation, text format.

Coordinates of every vector (markings, semiflows) follow the declaration
order of places; Parikh vectors follow the declaration order of
transitions.  Vectors are plain tuples of Python ints, so token counts are
unbounded.

Text format (one directive per line, ``#`` starts a comment)::

    net tn2
    place A
    place B
    trans t1
    arc A -> t1 2
    arc t1 -> B
    marking m0 { A: 5 }
    init m0
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

Vector = tuple[int, ...]


class NetError(ValueError):
    """Invalid net construction or invalid use of a net."""


class ParseError(NetError):
    """Syntax or semantic error in the textual net format."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class FiringError(NetError):
    """A transition (or a sequence element) is not enabled."""

    def __init__(self, message: str, index: int | None = None,
                 marking: Vector | None = None) -> None:
        super().__init__(message)
        self.index = index
        self.marking = marking


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _matrix(rows, nrows: int, ncols: int, what: str) -> tuple[Vector, ...]:
    out = tuple(tuple(int(x) for x in row) for row in rows)
    if len(out) != nrows or any(len(row) != ncols for row in out):
        raise NetError(f"{what} must be a {nrows}x{ncols} matrix")
    if any(x < 0 for row in out for x in row):
        raise NetError(f"{what} has a negative entry")
    return out


@dataclass(frozen=True)
class Net:
    """A place/transition net ``<P, T, Pre, Post>``.

    ``pre[p][t]`` and ``post[p][t]`` are indexed by place row and
    transition column, both in declaration order.
    """

    name: str
    places: tuple[str, ...]
    transitions: tuple[str, ...]
    pre: tuple[Vector, ...]
    post: tuple[Vector, ...]

    def __post_init__(self) -> None:
        places = tuple(self.places)
        transitions = tuple(self.transitions)
        object.__setattr__(self, "places", places)
        object.__setattr__(self, "transitions", transitions)
        names = places + transitions
        for n in names:
            if not isinstance(n, str) or not n:
                raise NetError("node identifiers must be non-empty strings")
        if len(set(names)) != len(names):
            seen: set[str] = set()
            dup = next(n for n in names if n in seen or seen.add(n))
            raise NetError(f"duplicate identifier {dup!r}")
        object.__setattr__(self, "pre", _matrix(self.pre, len(places), len(transitions), "pre"))
        object.__setattr__(self, "post", _matrix(self.post, len(places), len(transitions), "post"))

    @classmethod
    def from_arcs(cls, name: str, places: Sequence[str], transitions: Sequence[str],
                  arcs: Mapping[tuple[str, str], int]) -> Net:
        """Build a net from ``{(source, target): weight}`` arcs.

        A ``(place, transition)`` key is an input arc, ``(transition, place)``
        an output arc.
        """
        pidx = {p: i for i, p in enumerate(places)}
        tidx = {t: j for j, t in enumerate(transitions)}
        pre = [[0] * len(transitions) for _ in places]
        post = [[0] * len(transitions) for _ in places]
        for (src, dst), w in arcs.items():
            if src in pidx and dst in tidx:
                pre[pidx[src]][tidx[dst]] += w
            elif src in tidx and dst in pidx:
                post[pidx[dst]][tidx[src]] += w
            else:
                raise NetError(f"arc {src}->{dst} must join a place and a transition")
        return cls(name, tuple(places), tuple(transitions), pre, post)

    @property
    def d(self) -> int:
        return len(self.places)

    @cached_property
    def _pidx(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.places)}

    @cached_property
    def _tidx(self) -> dict[str, int]:
        return {t: j for j, t in enumerate(self.transitions)}

    def place_index(self, p: str) -> int:
        try:
            return self._pidx[p]
        except KeyError:
            raise NetError(f"unknown place {p!r}") from None

    def transition_index(self, t: str) -> int:
        try:
            return self._tidx[t]
        except KeyError:
            raise NetError(f"unknown transition {t!r}") from None

    @cached_property
    def pre_columns(self) -> tuple[Vector, ...]:
        """``Pre(., t)`` for every transition, in declaration order."""
        return tuple(tuple(row[j] for row in self.pre) for j in range(len(self.transitions)))

    @cached_property
    def post_columns(self) -> tuple[Vector, ...]:
        return tuple(tuple(row[j] for row in self.post) for j in range(len(self.transitions)))

    @cached_property
    def delta_columns(self) -> tuple[Vector, ...]:
        """``Post(., t) - Pre(., t)`` for every transition."""
        return tuple(tuple(b - a for a, b in zip(pre, post))
                     for pre, post in zip(self.pre_columns, self.post_columns))

    def pre_of(self, t: str) -> Vector:
        return self.pre_columns[self.transition_index(t)]

    def post_of(self, t: str) -> Vector:
        return self.post_columns[self.transition_index(t)]

    def marking(self, tokens: Mapping[str, int] | None = None, **kw: int) -> Vector:
        """Marking from a place->tokens mapping; unlisted places hold 0."""
        q = [0] * self.d
        for p, k in {**(tokens or {}), **kw}.items():
            if k < 0:
                raise NetError(f"negative marking for place {p!r}")
            q[self.place_index(p)] = int(k)
        return tuple(q)

    def check_marking(self, q: Sequence[int]) -> Vector:
        q = tuple(int(x) for x in q)
        if len(q) != self.d:
            raise NetError(f"marking has length {len(q)}, net has {self.d} places")
        if any(x < 0 for x in q):
            raise NetError("marking has a negative entry")
        return q

    def format_marking(self, q: Sequence) -> str:
        """``{A:5, B:1}`` with zero places left out."""
        inner = ", ".join(f"{p}:{x}" for p, x in zip(self.places, q) if x != 0)
        return "{" + inner + "}"


@dataclass(frozen=True)
class NetDocument:
    """A parsed net file: the net, its named markings and the Init set."""

    net: Net
    markings: dict[str, Vector] = field(default_factory=dict)
    init: tuple[str, ...] = ()

    def init_markings(self) -> list[Vector]:
        return [self.markings[m] for m in self.init]


# -- firing semantics ------------------------------------------------------

def enabled(net: Net, q: Sequence[int], t: str) -> bool:
    pre = net.pre_of(t)
    return all(x >= w for x, w in zip(q, pre))


def fire(net: Net, q: Sequence[int], t: str) -> Vector:
    """Fire ``t`` at ``q`` and return ``q - Pre(., t) + Post(., t)``."""
    j = net.transition_index(t)
    pre = net.pre_columns[j]
    for p, x, w in zip(net.places, q, pre):
        if x < w:
            raise FiringError(f"{t} is not enabled: place {p} holds {x} < {w}",
                              marking=tuple(q))
    return tuple(x + dx for x, dx in zip(q, net.delta_columns[j]))


def fire_sequence(net: Net, q: Sequence[int], sigma: Iterable[str]) -> Vector:
    """Fire a word of transitions, checking enabledness at every step.

    The result is cross-checked against the state equation.
    """
    start = net.check_marking(q)
    cur = start
    counts = [0] * len(net.transitions)
    for k, t in enumerate(sigma):
        try:
            cur = fire(net, cur, t)
        except FiringError as exc:
            raise FiringError(f"step {k}: {exc}", index=k, marking=cur) from None
        counts[net.transition_index(t)] += 1
    assert cur == apply_state_equation(net, start, counts)
    return cur


def apply_state_equation(net: Net, q: Sequence[int], parikh: Sequence[int]) -> Vector:
    """``q + (Post - Pre) . parikh``; entries may come out negative."""
    if len(q) != net.d or len(parikh) != len(net.transitions):
        raise NetError("dimension mismatch in state equation")
    out = list(q)
    for n, delta in zip(parikh, net.delta_columns):
        if n:
            for i, dx in enumerate(delta):
                out[i] += n * dx
    return tuple(out)


def incidence(net: Net) -> tuple[Vector, ...]:
    """Incidence matrix ``Post - Pre`` as place rows."""
    return tuple(tuple(b - a for a, b in zip(ra, rb)) for ra, rb in zip(net.pre, net.post))


# -- structure -------------------------------------------------------------

def _place_set(net: Net, places: Iterable[str]) -> set[int]:
    return {net.place_index(p) for p in places}


def is_siphon(net: Net, places: Iterable[str]) -> bool:
    """Every transition feeding the set also consumes from it."""
    D = _place_set(net, places)
    for pre, post in zip(net.pre_columns, net.post_columns):
        if any(post[i] for i in D) and not any(pre[i] for i in D):
            return False
    return True


def is_trap(net: Net, places: Iterable[str]) -> bool:
    """Every transition consuming from the set also feeds it."""
    D = _place_set(net, places)
    for pre, post in zip(net.pre_columns, net.post_columns):
        if any(pre[i] for i in D) and not any(post[i] for i in D):
            return False
    return True


@dataclass(frozen=True)
class NetClass:
    ordinary: bool
    state_machine: bool


def classify(net: Net) -> NetClass:
    ordinary = all(x in (0, 1) for m in (net.pre, net.post) for row in m for x in row)
    sm = ordinary and all(sum(pre) == 1 and sum(post) == 1
                          for pre, post in zip(net.pre_columns, net.post_columns))
    return NetClass(ordinary, sm)


# -- text format -------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<arrow>->)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
                    r"|(?P<nat>-?\d+)|(?P<punct>[{}:,]))")


def _tokenize(text: str, lineno: int) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[col - 1]!r}", lineno, col)
        kind = m.lastgroup
        col = m.start(kind) + 1
        toks.append((kind, m.group(kind), col))
        pos = m.end()
    return toks


class _Line:
    def __init__(self, toks, lineno: int, eol_col: int) -> None:
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.eol_col = eol_col

    def error(self, msg: str, col: int | None = None) -> ParseError:
        if col is None:
            col = self.toks[self.i][2] if self.i < len(self.toks) else self.eol_col
        return ParseError(msg, self.lineno, col)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, kind: str, value: str | None = None, what: str | None = None):
        tok = self.peek()
        if tok is None or tok[0] != kind or (value is not None and tok[1] != value):
            raise self.error(f"expected {what or value or kind}")
        self.i += 1
        return tok

    def nat(self, what: str) -> int:
        tok = self.take("nat", what=what)
        if tok[1].startswith("-"):
            raise ParseError(f"negative {what}", self.lineno, tok[2])
        return int(tok[1])

    def end(self) -> None:
        if self.peek() is not None:
            raise self.error("unexpected trailing input")


def parse_net(text: str) -> NetDocument:
    """Parse the textual net format into a :class:`NetDocument`."""
    name: str | None = None
    places: list[str] = []
    transitions: list[str] = []
    declared: dict[str, str] = {}
    arcs: dict[tuple[str, str], int] = {}
    markings: dict[str, Vector] = {}
    raw_markings: list[tuple[str, dict[str, int], list]] = []
    init: list[str] = []
    init_seen = False

    def declare(ident_tok, kind: str, ln: _Line) -> str:
        ident = ident_tok[1]
        if ident in declared or ident == name:
            raise ParseError(f"duplicate identifier {ident!r}", ln.lineno, ident_tok[2])
        declared[ident] = kind
        return ident

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = _tokenize(body, lineno)
        if not toks:
            continue
        ln = _Line(toks, lineno, len(body.rstrip()) + 1)
        kw = ln.take("ident", what="directive")
        directive = kw[1]
        if directive == "net":
            if name is not None:
                raise ParseError("duplicate net directive", lineno, kw[2])
            name = ln.take("ident", what="net name")[1]
            ln.end()
        elif directive == "place":
            places.append(declare(ln.take("ident", what="place name"), "place", ln))
            ln.end()
        elif directive == "trans":
            transitions.append(declare(ln.take("ident", what="transition name"), "trans", ln))
            ln.end()
        elif directive == "arc":
            src = ln.take("ident", what="arc source")
            ln.take("arrow", "->")
            dst = ln.take("ident", what="arc target")
            weight = ln.nat("weight") if ln.peek() is not None else 1
            ln.end()
            ks, kd = declared.get(src[1]), declared.get(dst[1])
            if ks is None:
                other = declared.get(dst[1])
                kind = "transition" if other == "place" else "place"
                raise ParseError(f"undeclared {kind} {src[1]!r}", lineno, src[2])
            if kd is None:
                kind = "transition" if ks == "place" else "place"
                raise ParseError(f"undeclared {kind} {dst[1]!r}", lineno, dst[2])
            if ks == kd:
                raise ParseError("arc must join a place and a transition", lineno, src[2])
            key = (src[1], dst[1])
            if key in arcs:
                raise ParseError(f"duplicate arc {src[1]}->{dst[1]}", lineno, src[2])
            arcs[key] = weight
        elif directive == "marking":
            mname = ln.take("ident", what="marking name")
            if mname[1] in {m for m, _, _ in raw_markings}:
                raise ParseError(f"duplicate marking {mname[1]!r}", lineno, mname[2])
            ln.take("punct", "{")
            tokens: dict[str, int] = {}
            entries = []
            if ln.peek() is not None and ln.peek()[1] == "}":
                ln.i += 1
            else:
                while True:
                    p = ln.take("ident", what="place name")
                    ln.take("punct", ":")
                    k = ln.nat("token count")
                    if p[1] in tokens:
                        raise ParseError(f"place {p[1]!r} listed twice", lineno, p[2])
                    tokens[p[1]] = k
                    entries.append(p)
                    sep = ln.take("punct", what="',' or '}'")
                    if sep[1] == "}":
                        break
                    if sep[1] != ",":
                        raise ParseError("expected ',' or '}'", lineno, sep[2])
            ln.end()
            raw_markings.append((mname[1], tokens, [(p, lineno) for p in entries]))
        elif directive == "init":
            if init_seen:
                raise ParseError("duplicate init directive", lineno, kw[2])
            init_seen = True
            while True:
                tok = ln.take("ident", what="marking name")
                init.append((tok, lineno))
                if ln.peek() is None:
                    break
                ln.take("punct", ",")
        else:
            raise ParseError(f"unknown directive {directive!r}", lineno, kw[2])

    if name is None:
        raise ParseError("missing net directive", 1, 1)
    net = Net.from_arcs(name, places, transitions, arcs)
    for mname, tokens, entries in raw_markings:
        for ptok, lineno in entries:
            if declared.get(ptok[1]) != "place":
                raise ParseError(f"undeclared place {ptok[1]!r}", lineno, ptok[2])
        markings[mname] = net.marking(tokens)
    init_names = []
    for tok, lineno in init:
        if tok[1] not in markings:
            raise ParseError(f"undeclared marking {tok[1]!r}", lineno, tok[2])
        init_names.append(tok[1])
    return NetDocument(net, markings, tuple(init_names))


def serialize_net(net: Net, markings: Mapping[str, Sequence[int]] | None = None,
                  init: Sequence[str] = ()) -> str:
    """Canonical text form; ``parse_net`` inverts it exactly."""
    lines = [f"net {net.name}"]
    lines += [f"place {p}" for p in net.places]
    lines += [f"trans {t}" for t in net.transitions]
    for j, t in enumerate(net.transitions):
        for i, p in enumerate(net.places):
            w = net.pre[i][j]
            if w:
                lines.append(f"arc {p} -> {t}" + (f" {w}" if w != 1 else ""))
        for i, p in enumerate(net.places):
            w = net.post[i][j]
            if w:
                lines.append(f"arc {t} -> {p}" + (f" {w}" if w != 1 else ""))
    for mname, q in (markings or {}).items():
        inner = ", ".join(f"{p}: {x}" for p, x in zip(net.places, q) if x)
        lines.append(f"marking {mname} {{{' ' + inner + ' ' if inner else ''}}}")
    if init:
        lines.append("init " + ", ".join(init))
    return "\n".join(lines) + "\n"


def document_text(doc: NetDocument) -> str:
    return serialize_net(doc.net, doc.markings, doc.init)
