"""Example objectives and the lower-bound game family.

The non-regular objectives (outbidding, energy) are truncated at a cap so
they become finite automata; each generator documents what happens past
the cap.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Mapping, Sequence

from safemem.errors import InputError
from safemem.games import MealyStrategy, MemoryStructure, verify_strategy, winning_pairs
from safemem.model import NEUTRAL, Arena, Edge, Lasso, Owner, SafetyAutomaton, eval_lasso
from safemem.residuals import WidthCertificate, build_poset, minimize, poset_width

MAX_COLORS = 16
MAX_OUTBIDDING = 64


def _subset_name(s) -> str:
    return "{" + ",".join(str(i) for i in sorted(s)) + "}"


def gen_generalized_safety(k: int) -> SafetyAutomaton:
    """Objective "at least one of the colors 1..k is never seen".

    States are the sets of colors seen so far; the full set is the sink and
    ``⊥`` is an uncolored letter.
    """
    if not 1 <= k <= MAX_COLORS:
        raise InputError(f"k must be in 1..{MAX_COLORS}, got {k}")
    colors = list(range(1, k + 1))
    alphabet = (NEUTRAL,) + tuple(str(i) for i in colors)
    subsets = [frozenset(c) for size in range(k + 1) for c in combinations(colors, size)]
    delta = {}
    for s in subsets:
        delta[(_subset_name(s), NEUTRAL)] = _subset_name(s)
        for i in colors:
            delta[(_subset_name(s), str(i))] = _subset_name(s | {i})
    states = tuple(_subset_name(s) for s in subsets)
    return SafetyAutomaton(alphabet, states, "{}", {states[-1]}, delta)


def gen_energy(cap: int, init: int = 0) -> SafetyAutomaton:
    """Energy objective with ``a`` reloading and ``b`` consuming one unit.

    Levels saturate at ``cap``; consuming at level 0 is unsafe.
    """
    if cap < 0 or not 0 <= init <= cap:
        raise InputError(f"need 0 <= init <= cap, got cap={cap}, init={init}")
    levels = [str(n) for n in range(cap + 1)]
    delta = {}
    for n in range(cap + 1):
        delta[(str(n), "a")] = str(min(n + 1, cap))
        delta[(str(n), "b")] = str(n - 1) if n > 0 else "sink"
    delta[("sink", "a")] = delta[("sink", "b")] = "sink"
    return SafetyAutomaton(("a", "b"), levels + ["sink"], str(init), {"sink"}, delta)


def gen_outbidding(n_max: int) -> SafetyAutomaton:
    """Outbidding objective ``a^n b^p c^ω`` with ``n <= p``, truncated.

    Words with more than ``n_max`` a's are forbidden, as is any ``a`` once a
    ``b`` was read. ``a^n`` counts the a's; ``a^nb`` is the state reached by
    ``a^n b``, where ``n - 1`` more b's are owed before ``c`` may follow
    (``b`` alone leads to ``a^1b`` since nothing is owed either way).
    """
    if not 1 <= n_max <= MAX_OUTBIDDING:
        raise InputError(f"N must be in 1..{MAX_OUTBIDDING}, got {n_max}")
    A = [f"a^{n}" for n in range(n_max + 1)]
    B = {n: f"a^{n}b" for n in range(1, n_max + 1)}
    delta = {}
    for n in range(n_max + 1):
        delta[(A[n], "a")] = A[n + 1] if n < n_max else "sink"
        delta[(A[n], "b")] = B[max(n, 1)]
        delta[(A[n], "c")] = "c" if n == 0 else "sink"
    for n in range(1, n_max + 1):
        delta[(B[n], "a")] = "sink"
        delta[(B[n], "b")] = B[max(n - 1, 1)]
        delta[(B[n], "c")] = "c" if n == 1 else "sink"
    delta.update({("c", "c"): "c", ("c", "a"): "sink", ("c", "b"): "sink"})
    delta.update({("sink", x): "sink" for x in "abc"})
    states = A + list(B.values()) + ["c", "sink"]
    return SafetyAutomaton(("a", "b", "c"), states, A[0], {"sink"}, delta)


def _next_pow2(v: int) -> int:
    p = 1
    while p < v:
        p *= 2
    return p


#: Built-in counter actions as functions of the current value.
COUNTER_ACTIONS: dict[str, Callable[[int], int]] = {
    "nop": lambda v: v,
    "inc": lambda v: v + 1,
    "reset": lambda v: 0,
    "half": lambda v: v // 2,
    "next_pow2": _next_pow2,
}


def _action_table(name, given, n_max) -> list[int | None]:
    if given is None:
        if name not in COUNTER_ACTIONS:
            raise InputError(f"unknown counter action {name!r}")
        f = COUNTER_ACTIONS[name]
        return [f(v) if f(v) <= n_max else None for v in range(n_max + 1)]
    table = list(given)
    if len(table) != n_max + 1:
        raise InputError(f"action {name!r}: table needs {n_max + 1} entries")
    out = []
    for x in table:
        if x is None or x == "overflow":
            out.append(None)
        elif isinstance(x, int) and 0 <= x <= n_max:
            out.append(x)
        else:
            raise InputError(f"action {name!r}: invalid output {x!r}")
    return out


def gen_counter(
    n_max: int,
    actions: Sequence[str] | Mapping[str, Sequence[int | str | None] | None],
) -> SafetyAutomaton:
    """Boundedness objective: a counter starting at 0 must stay within ``n_max``.

    Args:
        n_max: the bound.
        actions: names of built-in actions (see ``COUNTER_ACTIONS``), or a
            mapping from action name to an explicit table of outputs on
            ``0..n_max`` (``None`` or ``"overflow"`` for overflow; a ``None``
            table selects the built-in of that name).

    Raises:
        InputError: on a non-monotone table or unknown action.
    """
    if n_max < 0:
        raise InputError(f"N must be non-negative, got {n_max}")
    if not isinstance(actions, Mapping):
        actions = {name: None for name in actions}
    if not actions:
        raise InputError("at least one action is required")
    over = n_max + 1
    delta = {}
    for name, given in actions.items():
        table = _action_table(name, given, n_max)
        rank = [over if x is None else x for x in table]
        if any(rank[i] > rank[i + 1] for i in range(n_max)):
            raise InputError(f"action {name!r} is not monotone")
        for v, x in enumerate(table):
            delta[(str(v), name)] = "overflow" if x is None else str(x)
        delta[("overflow", name)] = "overflow"
    states = [str(v) for v in range(n_max + 1)] + ["overflow"]
    return SafetyAutomaton(tuple(actions), states, "0", {"overflow"}, delta)


def gen_figure1() -> tuple[SafetyAutomaton, Arena, str]:
    """The "a and b are never both seen" objective and its two-memory game.

    Adam picks a or b, then Eve picks a or b; ``c`` never changes the
    objective's state and colors the padding self-loop at ``v2``.
    """
    delta = {}
    for q in ("ε", "a-seen", "b-seen", "both"):
        delta[(q, "c")] = q
    delta.update({
        ("ε", "a"): "a-seen", ("ε", "b"): "b-seen",
        ("a-seen", "a"): "a-seen", ("a-seen", "b"): "both",
        ("b-seen", "a"): "both", ("b-seen", "b"): "b-seen",
        ("both", "a"): "both", ("both", "b"): "both",
    })
    aut = SafetyAutomaton(("a", "b", "c"), ("ε", "a-seen", "b-seen", "both"), "ε", {"both"}, delta)
    arena = Arena(
        ("a", "b", "c"),
        [("v0", Owner.ADAM), ("v1", Owner.EVE), ("v2", Owner.ADAM)],
        [
            ("v0", "v1", "a"), ("v0", "v1", "b"),
            ("v1", "v2", "a"), ("v1", "v2", "b"),
            ("v2", "v2", "c"),
        ],
    )
    return aut, arena, "v0"


@dataclass(frozen=True, eq=False)
class LowerBoundGame:
    """A game where Eve wins but needs ``width`` memory states.

    ``automaton`` is the minimized objective, extended by a neutral color
    when it had none.
    """

    arena: Arena
    v0: str
    witness: MealyStrategy
    automaton: SafetyAutomaton
    certificate: WidthCertificate
    representatives: tuple[tuple[str, ...], ...]
    witness_ok: bool
    option_uniqueness: bool

    @property
    def width(self) -> int:
        return self.certificate.width


def _gadget(edges, vertices, origin: str, tag: str, lasso: Lasso) -> None:
    """Append a path spelling ``lasso.prefix`` then a cycle spelling ``lasso.cycle``."""
    prefix, cycle = lasso.prefix, lasso.cycle
    if not prefix:
        # Keep the cycle off the origin so gadgets never mix.
        prefix = cycle
    word = prefix + cycle
    nodes = [origin] + [f"{tag}.{t}" for t in range(1, len(word))]
    for node in nodes[1:]:
        vertices.append((node, Owner.ADAM))
    nodes.append(nodes[len(prefix)])
    for t, a in enumerate(word):
        edges.append((nodes[t], nodes[t + 1], a))


def gen_lower_bound_game(aut: SafetyAutomaton) -> LowerBoundGame:
    """Game witnessing that width-many memory states are necessary.

    Adam first spells one representative ``w_i`` of a maximum antichain of
    residuals (a trie rooted at ``v0`` whose leaves meet at ``choice``),
    Eve then picks an option ``opt1..optK``, and from ``opt<j>`` Adam spells
    any separator lasso ``u_{j,k}``: safe after ``w_j`` but unsafe after
    ``w_k``. Eve wins exactly by picking the option matching the word.
    """
    aut = minimize(aut)
    neutral = aut.neutral_symbols()
    if neutral:
        neutral = neutral[0]
    else:
        aut, neutral = aut.with_neutral(NEUTRAL), NEUTRAL
    poset = build_poset(aut)
    cert = poset_width(poset)
    k = cert.width
    if k == 1:
        warnings.warn("objective has width 1: the lower-bound game is trivial")
    reps = tuple(poset.representatives[r] for r in cert.antichain)

    vertices = [("v0", Owner.ADAM)]
    edges = []
    trie = {(): "v0"}
    final_edges = []
    for i, w in enumerate(reps):
        node = "v0"
        inner = any(len(o) > len(w) and o[: len(w)] == w for o in reps)
        for t, a in enumerate(w):
            if t == len(w) - 1 and not inner:
                final_edges.append(Edge(node, "choice", a))
                break
            child = trie.get(w[: t + 1])
            if child is None:
                child = trie[w[: t + 1]] = f"w{len(trie)}"
                vertices.append((child, Owner.ADAM))
                edges.append((node, child, a))
            node = child
        else:
            final_edges.append(Edge(node, "choice", neutral))
    edges.extend(final_edges)
    vertices.append(("choice", Owner.EVE))
    options = [f"opt{i + 1}" for i in range(k)]
    for opt in options:
        vertices.append((opt, Owner.ADAM))
        edges.append(("choice", opt, neutral))
    for i, opt in enumerate(options):
        if k == 1:
            edges.append((opt, opt, neutral))
        for j in range(k):
            if j != i:
                _gadget(edges, vertices, opt, f"u{i + 1}_{j + 1}", cert.separators[(i, j)])
    arena = Arena(aut.alphabet, vertices, edges)

    states = tuple(range(1, k + 1))
    update = {(m, e): m for m in states for e in arena.edges}
    for i, e in enumerate(final_edges):
        for m in states:
            update[(m, e)] = i + 1
    nxt = {("choice", m): Edge("choice", options[m - 1], neutral) for m in states}
    witness = MealyStrategy(MemoryStructure(states, 1, update), nxt)

    witness_ok = verify_strategy(arena, aut, witness, "v0").winning
    unique = all(
        not eval_lasso(aut, cert.antichain[i], cert.separators[(j, i)])
        for i in range(k) for j in range(k) if i != j
    )
    pairs = winning_pairs(arena, aut)
    for i, r in enumerate(cert.antichain):
        winners = {j for j, opt in enumerate(options) if (opt, r) in pairs}
        unique = unique and winners == {i}
    return LowerBoundGame(arena, "v0", witness, aut, cert, reps, witness_ok, unique)
