"""Graphviz exports.

Eve vertices are circles and Adam vertices boxes. In poset drawings a solid
edge from L to L' means L ⊆ L' (covering pairs only) and a dotted edge
labelled a means L' = L·a.
"""
from __future__ import annotations

from safemem.games import ProductGame
from safemem.model import Arena, SafetyAutomaton
from safemem.residuals import ResidualPoset, WidthCertificate


def _q(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _grouped(pairs):
    """Merge parallel edges: {(src, dst): [labels]} in first-seen order."""
    out: dict = {}
    for src, dst, label in pairs:
        out.setdefault((src, dst), []).append(label)
    return out


def automaton_to_dot(aut: SafetyAutomaton, name: str = "objective") -> str:
    lines = [f"digraph {_q(name)} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for q in aut.states:
        shape = "doublecircle" if aut.is_sink(q) else "circle"
        lines.append(f"  {_q(q)} [shape={shape}];")
    lines.append(f"  __start -> {_q(aut.initial)};")
    moves = _grouped((q, aut.delta[(q, a)], a) for q in aut.states for a in aut.alphabet)
    for (q, r), labels in moves.items():
        lines.append(f"  {_q(q)} -> {_q(r)} [label={_q(','.join(labels))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def arena_to_dot(arena: Arena, v0: str | None = None, name: str = "arena") -> str:
    lines = [f"digraph {_q(name)} {{", "  rankdir=LR;"]
    for v in arena.vertices:
        shape = "circle" if v.owner.value == "Eve" else "box"
        extra = ", penwidth=2" if v.id == v0 else ""
        lines.append(f"  {_q(v.id)} [shape={shape}{extra}];")
    for e in arena.edges:
        lines.append(f"  {_q(e.src)} -> {_q(e.dst)} [label={_q(e.color)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def product_to_dot(product: ProductGame, name: str = "product") -> str:
    """Residual product; bad edges are dashed red."""
    lines = [f"digraph {_q(name)} {{", "  rankdir=LR;"]
    for v in product.arena.vertices:
        shape = "circle" if v.owner.value == "Eve" else "box"
        lines.append(f"  {_q(v.id)} [shape={shape}];")
    for e in product.arena.edges:
        style = ", style=dashed, color=red" if e in product.bad else ""
        lines.append(f"  {_q(e.src)} -> {_q(e.dst)} [label={_q(e.color)}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def poset_to_dot(poset: ResidualPoset, cert: WidthCertificate | None = None,
                 name: str = "residuals") -> str:
    antichain = set(cert.antichain) if cert else set()
    lines = [f"digraph {_q(name)} {{", "  rankdir=LR;"]
    for r in poset.residuals:
        word = "".join(poset.representatives[r]) or "ε"
        style = ", style=filled, fillcolor=lightgrey" if r in antichain else ""
        lines.append(f"  {_q(r)} [shape=ellipse, label={_q(f'{r} [{word}]')}{style}];")
    for a in poset.residuals:
        for b in poset.residuals:
            covers = poset.lt(a, b) and not any(
                poset.lt(a, c) and poset.lt(c, b) for c in poset.residuals
            )
            if covers:
                lines.append(f"  {_q(a)} -> {_q(b)};")
    steps = _grouped(
        (r, poset.step[(r, a)], a)
        for r in poset.residuals for a in poset.automaton.alphabet
        if poset.step[(r, a)] is not None
    )
    for (r, s), labels in steps.items():
        lines.append(f"  {_q(r)} -> {_q(s)} [style=dotted, label={_q(','.join(labels))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
