"""Strategies with at most width-many memory states, and a brute-force oracle.

Both synthesizers start from the winning pairs (vertex, residual) of the
residual product. Memory state ``i`` at vertex ``v`` stands for a residual
(or a chain of residuals) that under-approximates what is left of the
objective, so memory states are shared across vertices by index while
their meaning is per vertex.
"""
from __future__ import annotations

from dataclasses import dataclass

from safemem.errors import BudgetExceeded, NotWinningError
from safemem.games import (
    MealyStrategy,
    MemoryStructure,
    build_residual_product,
    reachable_configurations,
    solve_safety,
    verify_strategy,
    winning_pairs,
)
from safemem.model import Arena, SafetyAutomaton
from safemem.residuals import (
    ResidualPoset,
    WidthCertificate,
    build_poset,
    minimize,
    poset_width,
)


@dataclass(frozen=True, eq=False)
class SynthesisResult:
    strategy: MealyStrategy
    memory_size: int
    # (vertex, memory state) -> residual id (min-residual) or chain index (chain cover)
    labels: dict
    # (vertex, memory state) -> least residual the memory state vouches for
    under: dict
    # (vertex, memory state) pairs never reached from the initial configuration
    unreachable: frozenset
    poset: ResidualPoset
    algorithm: str


def _winning_sets(arena, aut, poset, v0):
    pairs = winning_pairs(arena, aut)
    if (v0, poset.initial) not in pairs:
        raise NotWinningError(f"Eve does not win from {v0!r}")
    return {
        v: [r for r in poset.residuals if (v, r) in pairs] for v in arena.vertex_ids
    }


def _assemble(arena, v0, size, target, choose, algorithm, labels, under, poset, aut):
    """Build the strategy from per-(vertex, memory) update/move rules.

    ``target(v, i, e)`` gives the memory state after edge ``e`` (or None
    for a self-loop) and ``choose(v, i)`` Eve's move (or None for the first
    edge); both are only called on labelled pairs.
    """
    states = tuple(range(1, size + 1))
    update, nxt = {}, {}
    for v in arena.vertex_ids:
        for i in states:
            labelled = (v, i) in labels
            for e in arena.out_edges(v):
                j = target(v, i, e) if labelled else None
                update[(i, e)] = i if j is None else j
            if arena.is_eve(v):
                e = choose(v, i) if labelled else None
                nxt[(v, i)] = arena.out_edges(v)[0] if e is None else e
    strategy = MealyStrategy(MemoryStructure(states, 1, update), nxt)
    reached = reachable_configurations(arena, strategy, v0)
    unreachable = frozenset(
        (v, i) for v in arena.vertex_ids for i in states if (v, i) not in reached
    )
    if not verify_strategy(arena, aut, strategy, v0).winning:
        raise RuntimeError(f"{algorithm} synthesis produced a losing strategy")
    return SynthesisResult(strategy, size, labels, under, unreachable, poset, algorithm)


def synthesize_min_residual(arena: Arena, aut: SafetyAutomaton, v0: str) -> SynthesisResult:
    """Winning strategy whose memory tracks minimal winning residuals.

    At each vertex the minimal residuals ``L`` with ``(v, L)`` winning form
    an antichain ``L_1(v), ..., L_p(v)``; memory state ``i`` stands for
    ``L_i(v)``. After an edge colored ``c`` the memory moves to the least
    ``j`` with ``L_j(v') <= L_i(v)·c``, and Eve moves along the first edge
    keeping ``L_i(v)·c`` winning.

    Raises:
        NotWinningError: Eve does not win from ``v0``.
    """
    aut = minimize(aut)
    poset = build_poset(aut)
    winning = _winning_sets(arena, aut, poset, v0)
    minimal = {}
    for v, ws in winning.items():
        minimal[v] = [r for r in ws if not any(poset.lt(s, r) for s in ws)]
    first = next(r for r in minimal[v0] if poset.le(r, poset.initial))
    minimal[v0].remove(first)
    minimal[v0].insert(0, first)
    size = max(1, max(len(m) for m in minimal.values()))
    labels = {(v, i + 1): r for v, ms in minimal.items() for i, r in enumerate(ms)}

    def target(v, i, e):
        after = poset.step[(labels[(v, i)], e.color)]
        if after is None:
            return None
        for j, r in enumerate(minimal[e.dst]):
            if poset.le(r, after):
                return j + 1
        return None

    def choose(v, i):
        label = labels[(v, i)]
        for e in arena.out_edges(v):
            after = poset.step[(label, e.color)]
            if after is not None and after in winning[e.dst]:
                return e
        return None

    return _assemble(arena, v0, size, target, choose, "min-residual", labels, labels, poset, aut)


def synthesize_chain_cover(
    arena: Arena,
    aut: SafetyAutomaton,
    v0: str,
    cert: WidthCertificate | None = None,
) -> SynthesisResult:
    """Winning strategy whose memory tracks chains of a Dilworth cover.

    The winning residuals at ``v`` are covered by the certificate's chains
    cut down to them; memory state ``i`` stands for the ``i``-th such chain.
    An edge colored ``c`` sends the chain's minimum ``L`` to ``L·c`` and the
    memory to the chain holding it; Eve moves along the first edge that is
    good for ``L`` (hence for the whole chain).

    Raises:
        NotWinningError: Eve does not win from ``v0``.
    """
    aut = minimize(aut)
    poset = build_poset(aut)
    if cert is None:
        cert = poset_width(poset, separators=False)
    winning = _winning_sets(arena, aut, poset, v0)
    chain_of = {r: t for t, chain in enumerate(cert.chains) for r in chain}
    chains_at, bottom = {}, {}
    for v, ws in winning.items():
        ws = set(ws)
        chains_at[v] = []
        for t, chain in enumerate(cert.chains):
            inside = [r for r in chain if r in ws]
            if inside:
                chains_at[v].append(t)
                bottom[(v, t)] = inside[0]
    start_chain = chain_of[poset.initial]
    chains_at[v0].remove(start_chain)
    chains_at[v0].insert(0, start_chain)
    size = max(1, max(len(ts) for ts in chains_at.values()))
    labels = {(v, i + 1): t for v, ts in chains_at.items() for i, t in enumerate(ts)}

    def target(v, i, e):
        after = poset.step[(bottom[(v, labels[(v, i)])], e.color)]
        if after is None or after not in winning[e.dst]:
            return None
        return chains_at[e.dst].index(chain_of[after]) + 1

    def choose(v, i):
        low = bottom[(v, labels[(v, i)])]
        for e in arena.out_edges(v):
            after = poset.step[(low, e.color)]
            if after is not None and after in winning[e.dst]:
                return e
        return None

    under = {(v, i): bottom[(v, t)] for (v, i), t in labels.items()}
    return _assemble(arena, v0, size, target, choose, "chain", labels, under, poset, aut)


# --------------------------------------------------------------------------
# brute-force oracle

#: Refuse instances with |V| * |E| * max_m above this.
BRUTEFORCE_BUDGET = 200_000
#: Refuse once the search has expanded this many partial strategies.
NODE_BUDGET = 500_000


def _eve_reachers(arena: Arena) -> set:
    """Vertices from which some Eve vertex is reachable (itself included)."""
    found = {v for v in arena.vertex_ids if arena.is_eve(v)}
    stack = list(found)
    while stack:
        u = stack.pop()
        for e in arena.in_edges(u):
            if e.src not in found:
                found.add(e.src)
                stack.append(e.src)
    return found


def find_strategy_bruteforce(
    arena: Arena,
    aut: SafetyAutomaton,
    v0: str,
    m: int,
    prune: bool = True,
    symmetry: bool = True,
    node_budget: int = NODE_BUDGET,
) -> MealyStrategy | None:
    """Search all ``m``-state edge-driven Mealy strategies for a winning one.

    Decisions (moves and memory updates) are fixed lazily, only once the
    exploration of reachable (vertex, memory, automaton state) triples needs
    them, and the search backtracks as soon as a sink is reachable. Memory
    updates on edges after which Eve never moves again are irrelevant and
    fixed to the initial state.

    Args:
        prune: also backtrack on reaching a (vertex, state) pair that the
            safety solver declares losing. Disable for a search independent
            of the solver.
        symmetry: only introduce memory states in increasing order.
    """
    relevant = _eve_reachers(arena)
    lost = set()
    if prune:
        product = build_residual_product(arena, aut)
        region, _ = solve_safety(product.arena, product.bad)
        lost = {product.back[p] for p in product.arena.vertex_ids if p not in region}
    start = (v0, 0, aut.initial)
    update: dict = {}
    move: dict = {}
    nodes = 0

    def closure():
        """Explore under the current partial strategy: 'lose', 'win' or a needed decision."""
        if aut.is_sink(aut.initial) or (v0, aut.initial) in lost:
            return "lose"
        seen = {start}
        order = [start]
        for v, mm, q in order:
            if arena.is_eve(v):
                if (v, mm) not in move:
                    return ("move", (v, mm))
                edges = (move[(v, mm)],)
            else:
                edges = arena.out_edges(v)
            for e in edges:
                key = (mm, e)
                if key in update:
                    mm2 = update[key]
                elif e.dst in relevant:
                    return ("update", key)
                else:
                    mm2 = 0
                q2 = aut.delta[(q, e.color)]
                if aut.is_sink(q2) or (e.dst, q2) in lost:
                    return "lose"
                t = (e.dst, mm2, q2)
                if t not in seen:
                    seen.add(t)
                    order.append(t)
        return "win"

    def search() -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded(f"search exceeded {node_budget} nodes")
        status = closure()
        if status == "lose":
            return False
        if status == "win":
            return True
        kind, key = status
        if kind == "move":
            for e in arena.out_edges(key[0]):
                move[key] = e
                if search():
                    return True
            del move[key]
            return False
        used = 1 + max(update.values(), default=0)
        options = range(min(used + 1, m)) if symmetry else range(m)
        for j in options:
            update[key] = j
            if search():
                return True
        del update[key]
        return False

    if not search():
        return None
    states = tuple(range(1, m + 1))
    full_update = {
        (i + 1, e): update.get((i, e), 0) + 1 for i in range(m) for e in arena.edges
    }
    nxt = {
        (v, i + 1): move.get((v, i), arena.out_edges(v)[0])
        for v in arena.vertex_ids if arena.is_eve(v)
        for i in range(m)
    }
    return MealyStrategy(MemoryStructure(states, 1, full_update), nxt)


def minimal_memory_bruteforce(
    arena: Arena,
    aut: SafetyAutomaton,
    v0: str,
    max_m: int,
    prune: bool = True,
    budget: int = BRUTEFORCE_BUDGET,
) -> int | None:
    """Least number of memory states of a winning strategy from ``v0``.

    Returns None when no strategy with at most ``max_m`` states wins.

    Raises:
        BudgetExceeded: the instance is too large for exhaustive search.
    """
    cost = len(arena.vertex_ids) * len(arena.edges) * max_m
    if cost > budget:
        raise BudgetExceeded(f"|V|*|E|*max_m = {cost} exceeds budget {budget}")
    for m in range(1, max_m + 1):
        if find_strategy_bruteforce(arena, aut, v0, m, prune=prune) is not None:
            return m
    return None
