"""Products with memory, safety solving, and strategy model checking."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from safemem.errors import InputError, MalformedStrategyError
from safemem.model import Arena, Edge, Play, SafetyAutomaton


@dataclass(frozen=True, eq=False)
class MemoryStructure:
    """Memory states updated along every played edge."""

    states: tuple
    initial: object
    update: dict  # (memory state, Edge) -> memory state

    def __len__(self) -> int:
        return len(self.states)


@dataclass(frozen=True, eq=False)
class MealyStrategy:
    """Finite-memory strategy for Eve: a memory structure plus a move table."""

    memory: MemoryStructure
    next: dict  # (Eve vertex, memory state) -> Edge

    @property
    def size(self) -> int:
        return len(self.memory)

    @classmethod
    def positional(cls, arena: Arena, choice: dict) -> "MealyStrategy":
        """One-state strategy playing ``choice[v]`` at each Eve vertex ``v``."""
        update = {(1, e): 1 for e in arena.edges}
        return cls(MemoryStructure((1,), 1, update), {(v, 1): e for v, e in choice.items()})


@dataclass(frozen=True, eq=False)
class ProductGame:
    """Arena expanded with the states of an automaton read along edge colors."""

    arena: Arena
    bad: frozenset
    back: dict  # product vertex id -> (vertex, automaton state)
    vertex: dict = field(repr=False)  # (vertex, automaton state) -> product vertex id


def build_residual_product(arena: Arena, aut: SafetyAutomaton) -> ProductGame:
    """Product of ``arena`` with ``aut`` used as memory.

    An edge is bad when it moves the automaton component into the sink, so
    a product play avoids bad edges iff the colors of its projection stay
    safe.
    """
    if set(arena.alphabet) != set(aut.alphabet):
        raise InputError(
            f"alphabet mismatch: arena {list(arena.alphabet)} vs objective {list(aut.alphabet)}"
        )
    vertex = {}
    vertices = []
    for v in arena.vertices:
        for q in aut.states:
            vertex[(v.id, q)] = f"({v.id}, {q})"
            vertices.append((vertex[(v.id, q)], v.owner))
    if len(set(vertex.values())) != len(vertex):
        raise InputError("product vertex names clash")
    edges, bad = [], set()
    for v in arena.vertex_ids:
        for q in aut.states:
            for e in arena.out_edges(v):
                q2 = aut.delta[(q, e.color)]
                pe = Edge(vertex[(v, q)], vertex[(e.dst, q2)], e.color)
                edges.append(pe)
                if aut.is_sink(q2):
                    bad.add(pe)
    product = Arena(arena.alphabet, vertices, edges)
    return ProductGame(product, frozenset(bad), {p: k for k, p in vertex.items()}, vertex)


def refine_once(arena: Arena, bad, region) -> frozenset:
    """One step of the safety fixpoint: keep vertices that can stay in ``region``."""
    keep = set()
    for v in region:
        good = [e for e in arena.out_edges(v) if e not in bad and e.dst in region]
        if arena.is_eve(v):
            if good:
                keep.add(v)
        elif len(good) == len(arena.out_edges(v)):
            keep.add(v)
    return frozenset(keep)


def solve_safety(arena: Arena, bad) -> tuple[frozenset, dict]:
    """Winning region and a positional strategy for avoiding ``bad`` edges.

    Losing vertices are removed with a worklist: an Eve vertex loses once
    all its good edges lead to losing vertices, an Adam vertex as soon as one
    edge is bad or leads to a losing vertex. The strategy picks, at each
    winning Eve vertex, the first edge that is not bad and stays winning.
    """
    bad = frozenset(bad)
    good_left = {}
    losing = set()
    queue = deque()
    for v in arena.vertex_ids:
        out = arena.out_edges(v)
        if arena.is_eve(v):
            good_left[v] = sum(1 for e in out if e not in bad)
            lost = good_left[v] == 0
        else:
            lost = any(e in bad for e in out)
        if lost:
            losing.add(v)
            queue.append(v)
    while queue:
        u = queue.popleft()
        for e in arena.in_edges(u):
            p = e.src
            if e in bad or p in losing:
                continue
            if arena.is_eve(p):
                good_left[p] -= 1
                if good_left[p] > 0:
                    continue
            losing.add(p)
            queue.append(p)
    region = frozenset(v for v in arena.vertex_ids if v not in losing)
    positional = {}
    for v in arena.vertex_ids:
        if v in region and arena.is_eve(v):
            positional[v] = next(
                e for e in arena.out_edges(v) if e not in bad and e.dst in region
            )
    return region, positional


def winning_pairs(arena: Arena, aut: SafetyAutomaton) -> frozenset:
    """Pairs (vertex, residual) from which Eve wins the residual product."""
    product = build_residual_product(arena, aut)
    region, _ = solve_safety(product.arena, product.bad)
    return frozenset(
        product.back[p] for p in region if not aut.is_sink(product.back[p][1])
    )


@dataclass(frozen=True)
class Verification:
    """Model-checking verdict; ``counterexample`` is a shortest losing play."""

    winning: bool
    counterexample: Play | None = None
    warnings: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.winning


def verify_strategy(
    arena: Arena, aut: SafetyAutomaton, strat: MealyStrategy, v0: str
) -> Verification:
    """Check that ``strat`` wins from ``v0`` against every Adam behaviour.

    Explores (vertex, memory, automaton state) triples breadth-first; Eve's
    moves come from the strategy and Adam's range over all edges.

    Raises:
        MalformedStrategyError: a reachable configuration has no move or
            memory update, or the move does not leave the current vertex.
    """
    arena.owner(v0)
    memory = strat.memory
    start = (v0, memory.initial, aut.initial)
    parent = {start: None}
    if aut.is_sink(aut.initial):
        return Verification(False, Play(v0))
    queue = deque([start])
    hit = None
    while queue and hit is None:
        v, m, q = queue.popleft()
        if arena.is_eve(v):
            e = strat.next.get((v, m))
            if e is None:
                raise MalformedStrategyError(f"no move for Eve at vertex {v!r}, memory {m!r}")
            if e.src != v or e not in arena.out_edges(v):
                raise MalformedStrategyError(f"move {tuple(e)} is not an edge leaving {v!r}")
            moves = (e,)
        else:
            moves = arena.out_edges(v)
        for e in moves:
            try:
                m2 = memory.update[(m, e)]
            except KeyError:
                raise MalformedStrategyError(
                    f"no memory update for state {m!r} on edge {tuple(e)}"
                ) from None
            t = (e.dst, m2, aut.delta[(q, e.color)])
            if t in parent:
                continue
            parent[t] = ((v, m, q), e)
            if aut.is_sink(t[2]):
                hit = t
                break
            queue.append(t)
    warnings = tuple(
        f"move for ({v}, {m}) does not leave {v}"
        for (v, m), e in strat.next.items()
        if e.src != v
    )
    if hit is None:
        return Verification(True, None, warnings)
    edges = []
    node = hit
    while parent[node] is not None:
        node, e = parent[node]
        edges.append(e)
    return Verification(False, Play(v0, tuple(reversed(edges))), warnings)


def reachable_configurations(arena: Arena, strat: MealyStrategy, v0: str) -> set:
    """(vertex, memory) pairs reachable from ``v0`` when Eve follows ``strat``."""
    start = (v0, strat.memory.initial)
    seen = {start}
    queue = deque([start])
    while queue:
        v, m = queue.popleft()
        if arena.is_eve(v):
            moves = (strat.next[(v, m)],)
        else:
            moves = arena.out_edges(v)
        for e in moves:
            t = (e.dst, strat.memory.update[(m, e)])
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return seen
