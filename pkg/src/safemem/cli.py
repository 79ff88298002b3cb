"""``safemem`` command line.

Exit codes: 0 success, 1 Eve loses (or no strategy found), 2 invalid input
or refused request, 3 internal verification failure.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from safemem import __version__
from safemem import dot, io
from safemem.errors import (
    BudgetExceeded,
    EmptyObjectiveError,
    InputError,
    MalformedStrategyError,
    NotWinningError,
)
from safemem.games import build_residual_product, verify_strategy
from safemem.generators import (
    gen_counter,
    gen_energy,
    gen_figure1,
    gen_generalized_safety,
    gen_lower_bound_game,
    gen_outbidding,
)
from safemem.model import validate_arena
from safemem.residuals import build_poset, minimize, poset_width
from safemem.synthesis import (
    minimal_memory_bruteforce,
    synthesize_chain_cover,
    synthesize_min_residual,
)

EXIT_OK, EXIT_LOSE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class InternalError(Exception):
    pass


def _emit(text: str, out: str | None = None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _table(rows) -> str:
    return "".join("\t".join(str(x) for x in row) + "\n" for row in rows)


def _objective(args):
    return minimize(io.load_automaton(args.objective))


def _game(args):
    arena = io.load_arena(args.arena)
    report = validate_arena(arena)
    if not report.ok:
        raise InputError("invalid arena: " + "; ".join(report.violations))
    if args.v0 not in arena:
        raise InputError(f"--v0: unknown vertex {args.v0!r}")
    return arena, _objective(args)


def cmd_residuals(args) -> int:
    aut = _objective(args)
    poset = build_poset(aut)
    cert = poset_width(poset)
    if args.format == "dot":
        _emit(dot.poset_to_dot(poset, cert), args.out)
    elif args.format == "table":
        rows = [("residual", "representative", "chain", "antichain", "above")]
        for r in poset.residuals:
            above = ",".join(s for s in poset.residuals if poset.lt(r, s))
            rows.append((r, " ".join(poset.representatives[r]) or "ε", cert.chain_of(r),
                         int(r in cert.antichain), above or "-"))
        _emit(_table(rows) + f"# width\t{cert.width}\n", args.out)
    else:
        _emit(io.dumps(io.poset_to_dict(poset, cert)), args.out)
    return EXIT_OK


def cmd_width(args) -> int:
    poset = build_poset(_objective(args))
    cert = poset_width(poset)
    if args.format == "table":
        rows = [("chain", "residuals")] + [(i, " ".join(c)) for i, c in enumerate(cert.chains)]
        _emit(_table(rows) + f"# width\t{cert.width}\n", args.out)
    else:
        _emit(io.dumps(io.certificate_to_dict(cert, poset)), args.out)
    return EXIT_OK


def _synthesize(args, arena, aut):
    synth = synthesize_chain_cover if args.algo == "chain" else synthesize_min_residual
    try:
        result = synth(arena, aut, args.v0)
    except RuntimeError as exc:
        raise InternalError(str(exc)) from None
    if args.verify and not verify_strategy(arena, aut, result.strategy, args.v0).winning:
        raise InternalError("synthesized strategy failed re-verification")
    return result


def cmd_solve(args) -> int:
    arena, aut = _game(args)
    if args.format == "dot":
        _emit(dot.product_to_dot(build_residual_product(arena, aut)), args.out)
        return EXIT_OK
    try:
        result = _synthesize(args, arena, aut)
    except NotWinningError:
        _emit(io.dumps({"v0": args.v0, "winner": "Adam"}))
        return EXIT_LOSE
    summary = {
        "v0": args.v0,
        "winner": "Eve",
        "algorithm": result.algorithm,
        "memory_size": result.memory_size,
    }
    if args.out:
        _emit(io.dumps(io.strategy_to_dict(result.strategy, arena)), args.out)
    else:
        summary["strategy"] = io.strategy_to_dict(result.strategy, arena)
    _emit(io.dumps(summary))
    return EXIT_OK


def cmd_synthesize(args) -> int:
    arena, aut = _game(args)
    try:
        result = _synthesize(args, arena, aut)
    except NotWinningError as exc:
        print(f"safemem: {exc}", file=sys.stderr)
        return EXIT_LOSE
    _emit(io.dumps(io.synthesis_to_dict(result, arena)), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    arena, aut = _game(args)
    strategy = io.load_strategy(args.strategy)
    result = verify_strategy(arena, aut, strategy, args.v0)
    for w in result.warnings:
        print(f"safemem: warning: {w}", file=sys.stderr)
    _emit(io.dumps(io.verification_to_dict(result)), args.out)
    return EXIT_OK if result.winning else EXIT_LOSE


def cmd_lowerbound(args) -> int:
    aut = io.load_automaton(args.objective)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        game = gen_lower_bound_game(aut)
    for w in caught:
        print(f"safemem: warning: {w.message}", file=sys.stderr)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "arena.json").write_text(io.dumps(io.arena_to_dict(game.arena)), encoding="utf-8")
        (out / "objective.json").write_text(
            io.dumps(io.automaton_to_dict(game.automaton)), encoding="utf-8")
        (out / "strategy.json").write_text(
            io.dumps(io.strategy_to_dict(game.witness, game.arena)), encoding="utf-8")
        if args.format == "dot":
            (out / "arena.dot").write_text(dot.arena_to_dot(game.arena, game.v0), encoding="utf-8")
    ok = {True: "OK", False: "FAIL"}
    print(f"width={game.width}, witness={ok[game.witness_ok]}, "
          f"option-uniqueness={ok[game.option_uniqueness]}")
    if not (game.witness_ok and game.option_uniqueness):
        raise InternalError("lower-bound game failed its generation checks")
    return EXIT_OK


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "figure1":
        aut, arena, v0 = gen_figure1()
        if args.dot:
            _emit(dot.automaton_to_dot(aut) + dot.arena_to_dot(arena, v0), args.out)
        else:
            _emit(io.dumps({
                "objective": io.automaton_to_dict(aut),
                "arena": io.arena_to_dict(arena),
                "v0": v0,
            }), args.out)
        return EXIT_OK
    if kind == "gensafety":
        aut = gen_generalized_safety(args.k)
    elif kind == "energy":
        aut = gen_energy(args.cap, args.init)
    elif kind == "outbidding":
        aut = gen_outbidding(args.n)
    else:
        aut = gen_counter(args.n, [a for a in args.actions.split(",") if a])
    _emit(dot.automaton_to_dot(aut) if args.dot else io.dumps(io.automaton_to_dict(aut)), args.out)
    return EXIT_OK


def cmd_bruteforce(args) -> int:
    arena, aut = _game(args)
    m = minimal_memory_bruteforce(arena, aut, args.v0, args.max_m, prune=not args.no_prune)
    if m is None:
        print("NotFound")
        return EXIT_LOSE
    print(m)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="safemem",
        description="Memory requirements of safety objectives in two-player games.",
    )
    parser.add_argument("--version", action="version", version=f"safemem {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def objective(p):
        p.add_argument("-o", "--objective", required=True, help="objective automaton JSON")

    def game(p):
        p.add_argument("-a", "--arena", required=True, help="arena JSON")
        objective(p)
        p.add_argument("--v0", required=True, help="initial vertex")

    def out(p):
        p.add_argument("--out", help="write output here instead of stdout")

    p = sub.add_parser("residuals", help="residual poset, width and certificate")
    objective(p)
    p.add_argument("--format", choices=("json", "dot", "table"), default="json")
    out(p)
    p.set_defaults(func=cmd_residuals)

    p = sub.add_parser("width", help="width certificate only")
    objective(p)
    p.add_argument("--format", choices=("json", "table"), default="json")
    out(p)
    p.set_defaults(func=cmd_width)

    for name, func, text in (
        ("solve", cmd_solve, "decide the winner and write a strategy"),
        ("synthesize", cmd_synthesize, "synthesize a width-bounded strategy"),
    ):
        p = sub.add_parser(name, help=text)
        game(p)
        p.add_argument("--algo", choices=("min-residual", "chain"), default="min-residual")
        p.add_argument("--verify", action="store_true", help="re-check the strategy before writing")
        if name == "solve":
            p.add_argument("--format", choices=("json", "dot"), default="json",
                           help="dot: draw the residual product instead")
        out(p)
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="model-check a strategy")
    game(p)
    p.add_argument("-s", "--strategy", required=True, help="strategy JSON")
    out(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lowerbound", help="build the game needing width-many memory states")
    objective(p)
    p.add_argument("--out-dir", help="write arena.json, objective.json, strategy.json here")
    p.add_argument("--format", choices=("json", "dot"), default="json",
                   help="dot: also write arena.dot")
    p.set_defaults(func=cmd_lowerbound)

    p = sub.add_parser("gen", help="generate example objectives")
    gen = p.add_subparsers(dest="kind", required=True)
    g = gen.add_parser("gensafety")
    g.add_argument("--k", type=int, required=True)
    g = gen.add_parser("energy")
    g.add_argument("--cap", type=int, required=True)
    g.add_argument("--init", type=int, default=0)
    g = gen.add_parser("outbidding")
    g.add_argument("--n", type=int, required=True)
    g = gen.add_parser("counter")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--actions", default="inc,reset",
                   help="comma-separated from nop, inc, reset, half, next_pow2")
    gen.add_parser("figure1")
    for g in gen.choices.values():
        g.add_argument("--dot", action="store_true", help="emit Graphviz instead of JSON")
        out(g)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bruteforce-mem", help="least memory of a winning strategy, exhaustively")
    game(p)
    p.add_argument("--max-m", type=int, default=3)
    p.add_argument("--no-prune", action="store_true", help="do not prune with the safety solver")
    p.set_defaults(func=cmd_bruteforce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, EmptyObjectiveError, MalformedStrategyError, BudgetExceeded) as exc:
        print(f"safemem: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalError as exc:
        print(f"safemem: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
