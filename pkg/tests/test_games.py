import random

import pytest

from safemem import (
    Arena,
    Edge,
    InputError,
    MalformedStrategyError,
    MealyStrategy,
    MemoryStructure,
    Owner,
    SafetyAutomaton,
    build_residual_product,
    find_strategy_bruteforce,
    gen_figure1,
    minimize,
    refine_once,
    solve_safety,
    verify_strategy,
    winning_pairs,
)
from randgen import random_arena, random_automaton

FULL = SafetyAutomaton(("a", "b"), ("q",), "q", (), {("q", "a"): "q", ("q", "b"): "q"})


def _figure1():
    aut, arena, v0 = gen_figure1()
    return minimize(aut), arena, v0


def test_figure1_product():
    aut, arena, _ = _figure1()
    product = build_residual_product(arena, aut)
    assert len(product.arena.vertex_ids) == 12
    live_bad = {
        (product.back[e.src][1], e.color) for e in product.bad
        if not aut.is_sink(product.back[e.src][1])
    }
    assert live_bad == {("a-seen", "b"), ("b-seen", "a")}
    for e in product.arena.edges:
        (v, q), (v2, q2) = product.back[e.src], product.back[e.dst]
        assert Edge(v, v2, e.color) in arena.edges
        assert aut.delta[(q, e.color)] == q2
        assert product.arena.owner(e.src) is arena.owner(v)


def test_product_with_full_language():
    arena = Arena(("a", "b"), [("x", Owner.EVE), ("y", Owner.ADAM)],
                  [("x", "y", "a"), ("y", "x", "b")])
    product = build_residual_product(arena, FULL)
    assert len(product.arena.edges) == len(arena.edges)
    assert not product.bad


def test_product_forced_bad_edge():
    aut = SafetyAutomaton(("a",), ("q", "s"), "q", {"s"}, {("q", "a"): "s", ("s", "a"): "s"})
    arena = Arena(("a",), [("v", Owner.EVE)], [("v", "v", "a")])
    product = build_residual_product(arena, aut)
    bad_from_q = [e for e in product.bad if product.back[e.src][1] == "q"]
    assert len(bad_from_q) == 1


def test_product_alphabet_mismatch():
    _, arena, _ = _figure1()
    with pytest.raises(InputError):
        build_residual_product(arena, FULL)


def test_solve_safety_examples():
    arena = Arena(("a",), [("x", Owner.EVE), ("y", Owner.ADAM), ("z", Owner.ADAM)],
                  [("x", "y", "a"), ("x", "z", "a"), ("y", "y", "a"), ("z", "z", "a")])
    region, positional = solve_safety(arena, set())
    assert region == set(arena.vertex_ids)
    bad = {Edge("y", "y", "a")}
    region, positional = solve_safety(arena, bad)
    assert region == {"x", "z"}
    assert positional["x"] == Edge("x", "z", "a")
    # all choices lead to the bad vertex: the Eve predecessor is lost too
    bad = {Edge("y", "y", "a"), Edge("z", "z", "a")}
    region, _ = solve_safety(arena, bad)
    assert region == set()


def test_figure1_winning():
    aut, arena, v0 = _figure1()
    product = build_residual_product(arena, aut)
    region, _ = solve_safety(product.arena, product.bad)
    assert product.vertex[(v0, aut.initial)] in region
    pairs = winning_pairs(arena, aut)
    assert {("v1", "a-seen"), ("v1", "b-seen"), ("v0", "ε")} <= pairs


def test_winning_pairs_trivial_cases():
    arena = Arena(("a", "b"), [("x", Owner.ADAM)], [("x", "x", "a")])
    assert ("x", "q") in winning_pairs(arena, FULL)
    kill = SafetyAutomaton(("a", "b"), ("p", "r", "s"), "p", {"s"},
                           {("p", "a"): "s", ("p", "b"): "r", ("r", "a"): "s", ("r", "b"): "r",
                            ("s", "a"): "s", ("s", "b"): "s"})
    assert not [p for p in winning_pairs(arena, kill) if p[0] == "x"]


def test_solver_fixpoint_and_positional_strategy(seed):
    rng = random.Random(seed)
    for _ in range(25):
        aut = minimize(random_automaton(rng, rng.randint(1, 5)))
        arena = random_arena(rng, aut.alphabet, rng.randint(2, 12))
        product = build_residual_product(arena, aut)
        region, positional = solve_safety(product.arena, product.bad)
        assert refine_once(product.arena, product.bad, region) == region
        strat = MealyStrategy.positional(product.arena, positional)
        for p in region:
            v, q = product.back[p]
            started = SafetyAutomaton(aut.alphabet, aut.states, q, aut.sink, aut.delta)
            assert verify_strategy(arena, started, _project(strat, product, arena, aut, q), v).winning


def _project(strat, product, arena, aut, start):
    """Play a positional product strategy on the arena, keeping the automaton state as memory."""
    update = {(q, e): aut.delta[(q, e.color)] for q in aut.states for e in arena.edges}
    nxt = {}
    for v in arena.vertex_ids:
        if not arena.is_eve(v):
            continue
        for q in aut.states:
            pe = strat.next.get((product.vertex[(v, q)], 1))
            if pe is None:
                nxt[(v, q)] = arena.out_edges(v)[0]
            else:
                nxt[(v, q)] = Edge(v, product.back[pe.dst][0], pe.color)
    return MealyStrategy(MemoryStructure(tuple(aut.states), start, update), nxt)


def test_verify_figure1_strategies():
    aut, arena, v0 = _figure1()
    copy = {}
    for m, letter in ((1, "a"), (2, "b")):
        copy[("v1", m)] = Edge("v1", "v2", letter)
    update = {(m, e): m for m in (1, 2) for e in arena.edges}
    update[(1, Edge("v0", "v1", "b"))] = 2
    update[(2, Edge("v0", "v1", "a"))] = 1
    good = MealyStrategy(MemoryStructure((1, 2), 1, update), copy)
    assert verify_strategy(arena, aut, good, v0).winning
    for letter in "ab":
        positional = MealyStrategy.positional(arena, {"v1": Edge("v1", "v2", letter)})
        result = verify_strategy(arena, aut, positional, v0)
        assert not result.winning
        assert len(result.counterexample.colors) == 2
        assert set(result.counterexample.colors) == {"a", "b"}


def test_verify_without_bad_edges():
    arena = Arena(("a", "b"), [("x", Owner.EVE)], [("x", "x", "a"), ("x", "x", "b")])
    strat = MealyStrategy.positional(arena, {"x": Edge("x", "x", "b")})
    assert verify_strategy(arena, FULL, strat, "x").winning


def test_verify_malformed():
    aut, arena, v0 = _figure1()
    missing = MealyStrategy.positional(arena, {})
    with pytest.raises(MalformedStrategyError):
        verify_strategy(arena, aut, missing, v0)
    wrong = MealyStrategy.positional(arena, {"v1": Edge("v0", "v1", "a")})
    with pytest.raises(MalformedStrategyError):
        verify_strategy(arena, aut, wrong, v0)


def test_verify_warns_on_unreachable_garbage():
    aut, arena, v0 = _figure1()
    strat = MealyStrategy.positional(arena, {"v1": Edge("v1", "v2", "a")})
    update = dict(strat.memory.update)
    nxt = dict(strat.next)
    nxt[("v1", 9)] = Edge("v0", "v1", "a")
    result = verify_strategy(arena, aut, MealyStrategy(MemoryStructure((1, 9), 1, update), nxt), v0)
    assert result.warnings


def test_determinacy_small_games(seed):
    """Outside Eve's winning region no strategy with up to 3 memory states wins."""
    rng = random.Random(seed + 7)
    checked = 0
    while checked < 15:
        aut = minimize(random_automaton(rng, rng.randint(1, 4)))
        arena = random_arena(rng, aut.alphabet, rng.randint(2, 6), max_out=2)
        pairs = winning_pairs(arena, aut)
        for v in arena.vertex_ids:
            if (v, aut.initial) in pairs:
                assert find_strategy_bruteforce(arena, aut, v, 1, prune=False) is not None
                continue
            for m in (1, 2, 3):
                assert find_strategy_bruteforce(arena, aut, v, m, prune=False) is None
            checked += 1
