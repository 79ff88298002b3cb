"""Residual languages of a safety objective and the width of their inclusion order.

The residuals of the objective are the states of its minimal automaton
(minus the sink). Inclusion between two of them is decided on the
synchronous product; when it fails a lasso separates them.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from safemem.errors import BudgetExceeded, EmptyObjectiveError, InputError
from safemem.matching import dilworth
from safemem.model import (
    Lasso,
    SafetyAutomaton,
    ValidationReport,
    eval_lasso,
    reachable_states,
    validate_automaton,
)


def live_states(aut: SafetyAutomaton) -> frozenset:
    """Non-sink states with at least one infinite sink-free continuation."""
    live = set(aut.safe_states)
    changed = True
    while changed:
        changed = False
        for q in list(live):
            if not any(aut.delta[(q, a)] in live for a in aut.alphabet):
                live.discard(q)
                changed = True
    return frozenset(live)


def minimize(aut: SafetyAutomaton) -> SafetyAutomaton:
    """Minimal automaton for the same objective.

    States with an empty residual are folded into a single sink (omitted
    when none is reachable). The result keeps only reachable states, ordered
    breadth-first from the initial state with the sink last; each state is
    named after the first original state reaching its class.
    """
    report = validate_automaton(aut)
    if not report.ok:
        raise InputError("invalid automaton: " + "; ".join(report.violations))
    reach = reachable_states(aut)
    live = live_states(aut)
    symbols = aut.alphabet.symbols
    alive = [q for q in reach if q in live]
    if not alive:
        q0 = aut.initial
        return SafetyAutomaton(aut.alphabet, (q0,), q0, {q0}, {(q0, a): q0 for a in symbols})

    block = {q: 0 for q in alive}
    n_blocks = 1
    while True:
        signatures: dict[tuple, int] = {}
        new_block = {}
        for q in alive:
            sig = (block[q],) + tuple(block.get(aut.delta[(q, a)], -1) for a in symbols)
            new_block[q] = signatures.setdefault(sig, len(signatures))
        block = new_block
        if len(signatures) == n_blocks:
            break
        n_blocks = len(signatures)

    names: dict[int, str] = {block[aut.initial]: aut.initial}
    order = [aut.initial]
    sink_name = None
    for q in order:
        for a in symbols:
            r = aut.delta[(q, a)]
            if r not in block:
                if sink_name is None:
                    sink_name = r
            elif block[r] not in names:
                names[block[r]] = r
                order.append(r)
    delta = {}
    for q in order:
        for a in symbols:
            r = aut.delta[(q, a)]
            delta[(q, a)] = names[block[r]] if r in block else sink_name
    states = tuple(order)
    sink = ()
    if sink_name is not None:
        states += (sink_name,)
        sink = (sink_name,)
        delta.update({(sink_name, a): sink_name for a in symbols})
    return SafetyAutomaton(aut.alphabet, states, aut.initial, sink, delta)


@dataclass(frozen=True)
class Inclusion:
    """Outcome of a residual inclusion test; truthy when included."""

    included: bool
    witness: Lasso | None = None

    def __bool__(self) -> bool:
        return self.included


def _separates(aut, q1, q2, lasso) -> bool:
    return eval_lasso(aut, q1, lasso) and not eval_lasso(aut, q2, lasso)


def _shrink(aut, q1, q2, lasso: Lasso) -> Lasso:
    """Greedily drop letters, prefix first, while the lasso still separates."""
    prefix, cycle = list(lasso.prefix), list(lasso.cycle)
    i = 0
    while i < len(prefix):
        trial = Lasso(prefix[:i] + prefix[i + 1:], cycle)
        if _separates(aut, q1, q2, trial):
            prefix = list(trial.prefix)
        else:
            i += 1
    i = 0
    while i < len(cycle) and len(cycle) > 1:
        trial = Lasso(prefix, cycle[:i] + cycle[i + 1:])
        if _separates(aut, q1, q2, trial):
            cycle = list(trial.cycle)
        else:
            i += 1
    return Lasso(prefix, cycle)


def residual_included(aut: SafetyAutomaton, q1: str, q2: str) -> Inclusion:
    """Decide whether the residual of ``q1`` is included in that of ``q2``.

    On failure the witness lasso is safe from ``q1`` and unsafe from ``q2``.
    """
    for q in (q1, q2):
        if q not in aut.states:
            raise InputError(f"unknown state {q!r}")
        if aut.is_sink(q):
            raise InputError(f"state {q!r} is a sink")
    live = live_states(aut)
    if q1 not in live:
        return Inclusion(True)
    symbols = aut.alphabet.symbols
    parent: dict[tuple, tuple | None] = {(q1, q2): None}
    queue = deque([(q1, q2)])
    hit = None
    while queue and hit is None:
        p, s = queue.popleft()
        for a in symbols:
            p2, s2 = aut.delta[(p, a)], aut.delta[(s, a)]
            if p2 not in live or (p2, s2) in parent:
                continue
            parent[(p2, s2)] = ((p, s), a)
            if aut.is_sink(s2):
                hit = (p2, s2)
                break
            queue.append((p2, s2))
    if hit is None:
        return Inclusion(True)

    prefix = []
    node = hit
    while parent[node] is not None:
        node, a = parent[node]
        prefix.append(a)
    prefix.reverse()
    # Stay inside the live part of the q1 component until a state repeats.
    p = hit[0]
    path, seen = [], {p: 0}
    while True:
        a = next(a for a in symbols if aut.delta[(p, a)] in live)
        path.append(a)
        p = aut.delta[(p, a)]
        if p in seen:
            break
        seen[p] = len(path)
    k = seen[p]
    lasso = Lasso(prefix + path[:k], path[k:])
    return Inclusion(False, _shrink(aut, q1, q2, lasso))


def inclusion_matrix(aut: SafetyAutomaton) -> np.ndarray:
    """Boolean matrix ``M[i, j]``: residual of state i included in that of j.

    Computed as the complement of the least fixpoint of non-inclusion:
    ``i`` escapes ``j`` if ``i`` is live and ``j`` is empty, or some letter
    leads to a pair that escapes.
    """
    index = {q: i for i, q in enumerate(aut.states)}
    live_set = live_states(aut)
    live = np.array([q in live_set for q in aut.states])
    succ = [np.array([index[aut.delta[(q, a)]] for q in aut.states]) for a in aut.alphabet]
    escapes = live[:, None] & ~live[None, :]
    while True:
        grown = escapes.copy()
        for d in succ:
            grown |= escapes[np.ix_(d, d)]
        grown &= live[:, None]
        if (grown == escapes).all():
            break
        escapes = grown
    return ~escapes


@dataclass(frozen=True, eq=False)
class ResidualPoset:
    """Non-empty residuals of an objective ordered by inclusion."""

    automaton: SafetyAutomaton
    residuals: tuple[str, ...]
    initial: str
    leq: frozenset
    representatives: dict
    step: dict
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {r: i for i, r in enumerate(self.residuals)})

    def le(self, r1: str, r2: str) -> bool:
        return (r1, r2) in self.leq

    def lt(self, r1: str, r2: str) -> bool:
        return r1 != r2 and (r1, r2) in self.leq

    def index(self, r: str) -> int:
        return self._index[r]

    def after(self, word, start: str | None = None) -> str | None:
        """Residual reached after reading ``word``; None once it is empty."""
        r = self.initial if start is None else start
        for a in word:
            r = self.step[(r, a)]
            if r is None:
                return None
        return r

    def __len__(self) -> int:
        return len(self.residuals)


def build_poset(aut: SafetyAutomaton) -> ResidualPoset:
    """Inclusion poset of a minimized automaton."""
    live = live_states(aut)
    if aut.initial not in live:
        raise EmptyObjectiveError("objective is empty: no safe continuation from the initial state")
    reach = set(reachable_states(aut))
    residuals = tuple(q for q in aut.states if q in live and q in reach)
    matrix = inclusion_matrix(aut)
    index = {q: i for i, q in enumerate(aut.states)}
    leq = set()
    for r1 in residuals:
        for r2 in residuals:
            if matrix[index[r1], index[r2]]:
                if r1 != r2 and matrix[index[r2], index[r1]]:
                    raise InputError(f"automaton is not minimal: {r1} and {r2} are equivalent")
                leq.add((r1, r2))

    representatives = {aut.initial: ()}
    queue = deque([aut.initial])
    while queue:
        q = queue.popleft()
        for a in aut.alphabet:
            r = aut.delta[(q, a)]
            if r in live and r not in representatives:
                representatives[r] = representatives[q] + (a,)
                queue.append(r)
    step = {}
    for r in residuals:
        for a in aut.alphabet:
            nxt = aut.delta[(r, a)]
            step[(r, a)] = nxt if nxt in live else None
    return ResidualPoset(
        aut,
        residuals,
        aut.initial,
        frozenset(leq),
        {r: representatives[r] for r in residuals},
        step,
    )


@dataclass(frozen=True)
class WidthCertificate:
    """Maximum antichain and minimum chain cover of equal size."""

    width: int
    antichain: tuple[str, ...]
    chains: tuple[tuple[str, ...], ...]
    separators: dict = field(default_factory=dict)

    def chain_of(self, r: str) -> int:
        for i, chain in enumerate(self.chains):
            if r in chain:
                return i
        raise KeyError(r)

    def check(self, poset: ResidualPoset) -> ValidationReport:
        report = ValidationReport()
        bad = report.violations
        if not (len(self.antichain) == len(self.chains) == self.width):
            bad.append("antichain, chain cover and width differ in size")
        for x, y in combinations(self.antichain, 2):
            if poset.le(x, y) or poset.le(y, x):
                bad.append(f"antichain members {x} and {y} are comparable")
        covered = [r for chain in self.chains for r in chain]
        if sorted(covered) != sorted(poset.residuals):
            bad.append("chains do not partition the residuals")
        for chain in self.chains:
            for x, y in zip(chain, chain[1:]):
                if not poset.lt(x, y):
                    bad.append(f"chain is not increasing at {x}, {y}")
        aut = poset.automaton
        for (i, j), lasso in self.separators.items():
            if not _separates(aut, self.antichain[i], self.antichain[j], lasso):
                bad.append(f"separator ({i}, {j}) does not separate")
        return report


def poset_width(poset: ResidualPoset, separators: bool = True) -> WidthCertificate:
    """Width of the residual poset with a Dilworth certificate.

    Args:
        poset: the residual poset.
        separators: also compute, for every ordered pair of antichain
            members, a lasso in the first residual and not in the second.
    """
    n = len(poset.residuals)
    less = [
        [j for j, y in enumerate(poset.residuals) if poset.lt(x, y)]
        for x in poset.residuals
    ]
    chains, antichain = dilworth(n, less)
    names = poset.residuals
    cert_antichain = tuple(names[i] for i in antichain)
    seps = {}
    if separators:
        for i, x in enumerate(cert_antichain):
            for j, y in enumerate(cert_antichain):
                if i != j:
                    seps[(i, j)] = residual_included(poset.automaton, x, y).witness
    cert = WidthCertificate(
        width=len(chains),
        antichain=cert_antichain,
        chains=tuple(tuple(names[i] for i in c) for c in chains),
        separators=seps,
    )
    report = cert.check(poset)
    if not report.ok:
        raise RuntimeError("width certificate failed: " + "; ".join(report.violations))
    return cert


def width_bruteforce(poset: ResidualPoset, bound: int = 20) -> int:
    """Largest antichain by exhaustive enumeration (test oracle)."""
    n = len(poset.residuals)
    if n > bound:
        raise BudgetExceeded(f"{n} residuals exceed the enumeration bound {bound}")
    comparable = [0] * n
    for i, x in enumerate(poset.residuals):
        for j, y in enumerate(poset.residuals):
            if i != j and (poset.le(x, y) or poset.le(y, x)):
                comparable[i] |= 1 << j
    best = 0

    def extend(size: int, candidates: int) -> None:
        nonlocal best
        if candidates == 0:
            best = max(best, size)
            return
        if size + bin(candidates).count("1") <= best:
            return
        low = candidates & -candidates
        i = low.bit_length() - 1
        extend(size + 1, candidates & ~low & ~comparable[i])
        extend(size, candidates & ~low)

    extend(0, (1 << n) - 1)
    return best
