"""JSON encodings of arenas, objectives, strategies and reports.

Field names are fixed; unknown or missing fields raise :class:`InputError`
naming the offending field. Words and lassos are lists of symbol names.
"""
from __future__ import annotations

import json
from pathlib import Path

from safemem.errors import InputError
from safemem.games import MealyStrategy, MemoryStructure, Verification
from safemem.model import Arena, Edge, Lasso, Play, SafetyAutomaton
from safemem.residuals import ResidualPoset, WidthCertificate


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def load_json(path) -> object:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from None


def _fields(obj, where: str, required, optional=()) -> dict:
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object")
    for key in obj:
        if key not in required and key not in optional:
            raise InputError(f"{where}: unknown field {key!r}")
    for key in required:
        if key not in obj:
            raise InputError(f"{where}: missing field {key!r}")
    return obj


def _list(obj, where: str) -> list:
    if not isinstance(obj, list):
        raise InputError(f"{where}: expected a list")
    return obj


def _str(obj, where: str) -> str:
    if not isinstance(obj, str):
        raise InputError(f"{where}: expected a string")
    return obj


# -- arenas and objectives ----------------------------------------------------

def arena_to_dict(arena: Arena) -> dict:
    return {
        "alphabet": list(arena.alphabet),
        "vertices": [{"id": v.id, "owner": v.owner.value} for v in arena.vertices],
        "edges": [{"src": e.src, "dst": e.dst, "color": e.color} for e in arena.edges],
    }


def arena_from_dict(data) -> Arena:
    _fields(data, "arena", ("alphabet", "vertices", "edges"))
    alphabet = [_str(s, "arena.alphabet") for s in _list(data["alphabet"], "arena.alphabet")]
    vertices = []
    for n, v in enumerate(_list(data["vertices"], "arena.vertices")):
        where = f"arena.vertices[{n}]"
        _fields(v, where, ("id", "owner"))
        vertices.append((_str(v["id"], where + ".id"), _str(v["owner"], where + ".owner")))
    edges = []
    for n, e in enumerate(_list(data["edges"], "arena.edges")):
        where = f"arena.edges[{n}]"
        _fields(e, where, ("src", "dst", "color"))
        edges.append(tuple(_str(e[k], f"{where}.{k}") for k in ("src", "dst", "color")))
    return Arena(alphabet, vertices, edges)


def automaton_to_dict(aut: SafetyAutomaton) -> dict:
    return {
        "alphabet": list(aut.alphabet),
        "states": list(aut.states),
        "initial": aut.initial,
        "sink": [q for q in aut.states if aut.is_sink(q)],
        "delta": [
            {"from": q, "symbol": a, "to": aut.delta[(q, a)]}
            for q in aut.states for a in aut.alphabet if (q, a) in aut.delta
        ],
    }


def automaton_from_dict(data) -> SafetyAutomaton:
    _fields(data, "automaton", ("alphabet", "states", "initial", "sink", "delta"))
    alphabet = [_str(s, "automaton.alphabet") for s in _list(data["alphabet"], "automaton.alphabet")]
    states = [_str(s, "automaton.states") for s in _list(data["states"], "automaton.states")]
    sink = [_str(s, "automaton.sink") for s in _list(data["sink"], "automaton.sink")]
    delta = {}
    for n, t in enumerate(_list(data["delta"], "automaton.delta")):
        where = f"automaton.delta[{n}]"
        _fields(t, where, ("from", "symbol", "to"))
        key = (_str(t["from"], where + ".from"), _str(t["symbol"], where + ".symbol"))
        if key in delta:
            raise InputError(f"{where}: duplicate transition for {key}")
        delta[key] = _str(t["to"], where + ".to")
    return SafetyAutomaton(alphabet, states, _str(data["initial"], "automaton.initial"), sink, delta)


def load_arena(path) -> Arena:
    return arena_from_dict(load_json(path))


def load_automaton(path) -> SafetyAutomaton:
    return automaton_from_dict(load_json(path))


# -- strategies ---------------------------------------------------------------

def strategy_to_dict(strat: MealyStrategy, arena: Arena) -> dict:
    memory = strat.memory
    update = [
        {"m": m, "src": e.src, "dst": e.dst, "color": e.color, "to": memory.update[(m, e)]}
        for m in memory.states for e in arena.edges if (m, e) in memory.update
    ]
    nxt = [
        {"vertex": v, "m": m, "src": e.src, "dst": e.dst, "color": e.color}
        for v in arena.vertex_ids for m in memory.states
        for e in [strat.next.get((v, m))] if e is not None
    ]
    return {
        "memory": {"states": list(memory.states), "initial": memory.initial, "update": update},
        "next": nxt,
    }


#: Extra top-level keys that synthesis output adds to a strategy.
_STRATEGY_EXTRAS = ("memory_size", "labels", "unreachable", "algorithm")


def strategy_from_dict(data) -> MealyStrategy:
    _fields(data, "strategy", ("memory", "next"), _STRATEGY_EXTRAS)
    mem = _fields(data["memory"], "strategy.memory", ("states", "initial", "update"))
    states = tuple(_list(mem["states"], "strategy.memory.states"))
    if mem["initial"] not in states:
        raise InputError("strategy.memory.initial: not a memory state")
    update = {}
    for n, u in enumerate(_list(mem["update"], "strategy.memory.update")):
        where = f"strategy.memory.update[{n}]"
        _fields(u, where, ("m", "src", "dst", "color", "to"))
        if u["m"] not in states or u["to"] not in states:
            raise InputError(f"{where}: unknown memory state")
        update[(u["m"], Edge(u["src"], u["dst"], u["color"]))] = u["to"]
    nxt = {}
    for n, x in enumerate(_list(data["next"], "strategy.next")):
        where = f"strategy.next[{n}]"
        _fields(x, where, ("vertex", "m", "src", "dst", "color"))
        if x["m"] not in states:
            raise InputError(f"{where}: unknown memory state")
        nxt[(x["vertex"], x["m"])] = Edge(x["src"], x["dst"], x["color"])
    return MealyStrategy(MemoryStructure(states, mem["initial"], update), nxt)


def load_strategy(path) -> MealyStrategy:
    return strategy_from_dict(load_json(path))


def synthesis_to_dict(result, arena: Arena) -> dict:
    out = strategy_to_dict(result.strategy, arena)
    out["memory_size"] = result.memory_size
    out["algorithm"] = result.algorithm
    out["labels"] = [
        {"vertex": v, "m": i, "label": label} for (v, i), label in result.labels.items()
    ]
    out["unreachable"] = [
        {"vertex": v, "m": i}
        for v in arena.vertex_ids for i in result.strategy.memory.states
        if (v, i) in result.unreachable
    ]
    return out


# -- reports ------------------------------------------------------------------

def lasso_to_dict(lasso: Lasso) -> dict:
    return {"prefix": list(lasso.prefix), "cycle": list(lasso.cycle)}


def play_to_dict(play: Play) -> dict:
    return {
        "start": play.start,
        "edges": [{"src": e.src, "dst": e.dst, "color": e.color} for e in play.edges],
        "colors": list(play.colors),
    }


def certificate_to_dict(cert: WidthCertificate, poset: ResidualPoset) -> dict:
    return {
        "width": cert.width,
        "antichain": list(cert.antichain),
        "chains": [list(c) for c in cert.chains],
        "representatives": {r: list(w) for r, w in poset.representatives.items()},
        "separators": [
            {"i": i, "j": j, **lasso_to_dict(lasso)}
            for (i, j), lasso in sorted(cert.separators.items())
        ],
    }


def poset_to_dict(poset: ResidualPoset, cert: WidthCertificate) -> dict:
    return {
        "residuals": list(poset.residuals),
        "initial": poset.initial,
        "leq": [[a, b] for a in poset.residuals for b in poset.residuals if poset.le(a, b)],
        "step": [
            {"from": r, "symbol": a, "to": poset.step[(r, a)]}
            for r in poset.residuals for a in poset.automaton.alphabet
        ],
        **certificate_to_dict(cert, poset),
    }


def verification_to_dict(result: Verification) -> dict:
    out = {"result": "Winning" if result.winning else "Losing"}
    if result.counterexample is not None:
        out["counterexample"] = play_to_dict(result.counterexample)
    if result.warnings:
        out["warnings"] = list(result.warnings)
    return out
