"""Core data types: alphabets, arenas, safety automata, lassos and plays.

Everything here is immutable once built. Constructors only check what is
needed to index the data; the structural invariants (no dead ends, total
transition function, absorbing sink) are reported by :func:`validate_arena`
and :func:`validate_automaton` so that broken inputs can be diagnosed
instead of rejected wholesale.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from safemem.errors import InputError

#: Color that loops on every automaton state, used for structural edges.
NEUTRAL = "⊥"

Word = tuple  # tuple[str, ...] of symbol names


class Owner(str, enum.Enum):
    EVE = "Eve"
    ADAM = "Adam"


class Vertex(NamedTuple):
    id: str
    owner: Owner


class Edge(NamedTuple):
    src: str
    dst: str
    color: str


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of color names; the order drives every iteration."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if not symbols:
            raise InputError("alphabet: must not be empty")
        for s in symbols:
            if not isinstance(s, str) or not s:
                raise InputError(f"alphabet: invalid symbol {s!r}")
        if len(set(symbols)) != len(symbols):
            raise InputError("alphabet: duplicate symbols")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(symbols)})

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol) -> bool:
        return symbol in self._index

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise InputError(f"unknown symbol {symbol!r}") from None

    def extended(self, symbol: str) -> "Alphabet":
        return Alphabet(self.symbols + (symbol,))


def _as_alphabet(alphabet) -> Alphabet:
    return alphabet if isinstance(alphabet, Alphabet) else Alphabet(tuple(alphabet))


@dataclass(frozen=True, eq=False)
class Arena:
    """Finite game graph with Eve/Adam vertices and colored edges.

    Out-edges of a vertex are kept in edge declaration order; this order is
    the tie-break used by every solver and synthesizer.
    """

    alphabet: Alphabet
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    _owner: dict = field(init=False, repr=False)
    _out: dict = field(init=False, repr=False)
    _in: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _as_alphabet(self.alphabet))
        try:
            vertices = tuple(Vertex(v, Owner(o)) for v, o in self.vertices)
        except ValueError as exc:
            raise InputError(f"vertices: {exc}") from None
        edges = tuple(Edge(*e) for e in self.edges)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)
        owner = {}
        for v in vertices:
            owner.setdefault(v.id, v.owner)
        out: dict[str, list[Edge]] = {v: [] for v in owner}
        inc: dict[str, list[Edge]] = {v: [] for v in owner}
        for e in edges:
            out.setdefault(e.src, []).append(e)
            inc.setdefault(e.dst, []).append(e)
        object.__setattr__(self, "_owner", owner)
        object.__setattr__(self, "_out", {v: tuple(es) for v, es in out.items()})
        object.__setattr__(self, "_in", {v: tuple(es) for v, es in inc.items()})

    @property
    def vertex_ids(self) -> tuple[str, ...]:
        return tuple(self._owner)

    def __contains__(self, v) -> bool:
        return v in self._owner

    def owner(self, v: str) -> Owner:
        try:
            return self._owner[v]
        except KeyError:
            raise InputError(f"unknown vertex {v!r}") from None

    def is_eve(self, v: str) -> bool:
        return self.owner(v) is Owner.EVE

    def out_edges(self, v: str) -> tuple[Edge, ...]:
        return self._out.get(v, ())

    def in_edges(self, v: str) -> tuple[Edge, ...]:
        return self._in.get(v, ())

    def with_owner(self, v: str, owner: Owner) -> "Arena":
        """Copy of this arena with the owner of ``v`` replaced."""
        self.owner(v)
        vertices = [(x.id, owner if x.id == v else x.owner) for x in self.vertices]
        return Arena(self.alphabet, vertices, self.edges)


@dataclass(frozen=True, eq=False)
class SafetyAutomaton:
    """Complete deterministic automaton with an absorbing rejecting sink.

    It denotes the set of infinite color sequences none of whose prefixes
    drives ``initial`` into ``sink``.
    """

    alphabet: Alphabet
    states: tuple[str, ...]
    initial: str
    sink: frozenset
    delta: Mapping[tuple[str, str], str]

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _as_alphabet(self.alphabet))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "sink", frozenset(self.sink))
        object.__setattr__(self, "delta", dict(self.delta))

    def is_sink(self, q: str) -> bool:
        return q in self.sink

    @property
    def safe_states(self) -> tuple[str, ...]:
        return tuple(q for q in self.states if q not in self.sink)

    def next(self, q: str, symbol: str) -> str:
        if symbol not in self.alphabet:
            raise InputError(f"unknown symbol {symbol!r}")
        try:
            return self.delta[(q, symbol)]
        except KeyError:
            raise InputError(f"no transition from {q!r} on {symbol!r}") from None

    def neutral_symbols(self) -> tuple[str, ...]:
        """Symbols that loop on every state (they never change a residual)."""
        return tuple(
            a for a in self.alphabet
            if all(self.delta.get((q, a)) == q for q in self.states)
        )

    def with_neutral(self, symbol: str = NEUTRAL) -> "SafetyAutomaton":
        """Copy extended by a fresh symbol looping on every state."""
        if symbol in self.alphabet:
            raise InputError(f"symbol {symbol!r} already in alphabet")
        delta = dict(self.delta)
        delta.update({(q, symbol): q for q in self.states})
        return SafetyAutomaton(
            self.alphabet.extended(symbol), self.states, self.initial, self.sink, delta
        )


@dataclass(frozen=True)
class Lasso:
    """The ultimately periodic word ``prefix · cycle^ω``."""

    prefix: tuple[str, ...]
    cycle: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise InputError("lasso: cycle must be non-empty")

    def unroll(self, n: int) -> tuple[str, ...]:
        """First ``n`` letters of the infinite word."""
        out = list(self.prefix[:n])
        while len(out) < n:
            out.extend(self.cycle[: n - len(out)])
        return tuple(out)

    def __len__(self) -> int:
        return len(self.prefix) + len(self.cycle)


@dataclass(frozen=True)
class Play:
    """Finite play: a start vertex followed by consecutive edges."""

    start: str
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        edges = tuple(Edge(*e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        at = self.start
        for e in edges:
            if e.src != at:
                raise InputError(f"play: edge {e} does not leave {at!r}")
            at = e.dst

    @property
    def colors(self) -> tuple[str, ...]:
        return tuple(e.color for e in self.edges)

    @property
    def last(self) -> str:
        return self.edges[-1].dst if self.edges else self.start


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_arena(arena: Arena) -> ValidationReport:
    report = ValidationReport()
    seen = set()
    for v in arena.vertices:
        if not isinstance(v.id, str) or not v.id:
            report.violations.append(f"invalid vertex id {v.id!r}")
        if v.id in seen:
            report.violations.append(f"duplicate vertex {v.id}")
        seen.add(v.id)
    triples = set()
    for e in arena.edges:
        for end in (e.src, e.dst):
            if end not in seen:
                report.violations.append(f"unknown vertex {end} in edge {tuple(e)}")
        if e.color not in arena.alphabet:
            report.violations.append(f"unknown color {e.color} in edge {tuple(e)}")
        if e in triples:
            report.violations.append(f"duplicate edge {tuple(e)}")
        triples.add(e)
    for v in arena.vertex_ids:
        if not arena.out_edges(v):
            report.violations.append(f"dead end at {v}")
    return report


def validate_automaton(aut: SafetyAutomaton) -> ValidationReport:
    report = ValidationReport()
    states = set(aut.states)
    if len(states) != len(aut.states):
        report.violations.append("duplicate states")
    if aut.initial not in states:
        report.violations.append(f"unknown initial state {aut.initial}")
    for q in sorted(aut.sink - states, key=str):
        report.violations.append(f"unknown sink state {q}")
    for (q, a), r in aut.delta.items():
        if q not in states or r not in states:
            report.violations.append(f"transition ({q}, {a}) -> {r} uses unknown state")
        if a not in aut.alphabet:
            report.violations.append(f"transition ({q}, {a}) uses unknown symbol")
    for q in aut.states:
        for a in aut.alphabet:
            r = aut.delta.get((q, a))
            if r is None:
                report.violations.append(f"incomplete: no transition from {q} on {a}")
            elif q in aut.sink and r not in aut.sink:
                report.violations.append(f"sink escape: {q} --{a}--> {r}")
    return report


def run_word(aut: SafetyAutomaton, start: str, word: Iterable[str]) -> str:
    q = start
    for a in word:
        q = aut.next(q, a)
    return q


def eval_lasso(aut: SafetyAutomaton, start: str, lasso: Lasso) -> bool:
    """Return True iff no prefix of the lasso drives ``start`` into the sink."""
    for a in lasso.prefix + lasso.cycle:
        aut.alphabet.index(a)
    q = start
    if aut.is_sink(q):
        return False
    for a in lasso.prefix:
        q = aut.next(q, a)
        if aut.is_sink(q):
            return False
    seen = set()
    while q not in seen:
        seen.add(q)
        for a in lasso.cycle:
            q = aut.next(q, a)
            if aut.is_sink(q):
                return False
    return True


def reachable_states(aut: SafetyAutomaton, start: str | None = None) -> list[str]:
    """States reachable from ``start`` in breadth-first, alphabet order."""
    start = aut.initial if start is None else start
    order = [start]
    seen = {start}
    for q in order:
        for a in aut.alphabet:
            r = aut.delta[(q, a)]
            if r not in seen:
                seen.add(r)
                order.append(r)
    return order


def words(alphabet: Sequence[str], max_len: int) -> Iterator[tuple[str, ...]]:
    """All words of length at most ``max_len`` in length-lexicographic order."""
    layer: list[tuple[str, ...]] = [()]
    yield ()
    for _ in range(max_len):
        layer = [w + (a,) for w in layer for a in alphabet]
        yield from layer
