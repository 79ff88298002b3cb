import json
import subprocess
import sys

import pytest

from safemem import (
    Edge,
    InputError,
    Lasso,
    MealyStrategy,
    build_poset,
    build_residual_product,
    gen_figure1,
    gen_generalized_safety,
    gen_lower_bound_game,
    minimize,
    poset_width,
    synthesize_chain_cover,
    verify_strategy,
)
from safemem import dot, io
from safemem.cli import main


# -- JSON ---------------------------------------------------------------------

def test_arena_round_trip():
    _, arena, _ = gen_figure1()
    back = io.arena_from_dict(json.loads(io.dumps(io.arena_to_dict(arena))))
    assert back.vertices == arena.vertices and back.edges == arena.edges
    assert back.alphabet == arena.alphabet


def test_automaton_round_trip():
    aut = gen_generalized_safety(3)
    back = io.automaton_from_dict(json.loads(io.dumps(io.automaton_to_dict(aut))))
    assert back.states == aut.states and back.delta == aut.delta
    assert back.sink == aut.sink and back.initial == aut.initial


def test_strategy_round_trip():
    game = gen_lower_bound_game(gen_generalized_safety(2))
    data = json.loads(io.dumps(io.strategy_to_dict(game.witness, game.arena)))
    back = io.strategy_from_dict(data)
    assert back.memory.update == game.witness.memory.update
    assert back.next == game.witness.next
    assert verify_strategy(game.arena, game.automaton, back, game.v0).winning


def test_unknown_and_missing_fields_named():
    data = io.arena_to_dict(gen_figure1()[1])
    data["colour"] = []
    with pytest.raises(InputError, match="colour"):
        io.arena_from_dict(data)
    data = io.automaton_to_dict(gen_generalized_safety(1))
    del data["initial"]
    with pytest.raises(InputError, match="initial"):
        io.automaton_from_dict(data)
    data = io.automaton_to_dict(gen_generalized_safety(1))
    data["delta"][0]["form"] = data["delta"][0].pop("from")
    with pytest.raises(InputError, match=r"delta\[0\]"):
        io.automaton_from_dict(data)


def test_certificate_json_shape():
    poset = build_poset(minimize(gen_generalized_safety(3)))
    data = io.certificate_to_dict(poset_width(poset), poset)
    assert set(data) == {"width", "antichain", "chains", "representatives", "separators"}
    assert data["width"] == 3
    assert all(set(s) == {"i", "j", "prefix", "cycle"} for s in data["separators"])
    assert io.lasso_to_dict(Lasso(("a",), ("b",))) == {"prefix": ["a"], "cycle": ["b"]}


# -- DOT ----------------------------------------------------------------------

def test_poset_dot_conventions():
    poset = build_poset(minimize(gen_generalized_safety(2)))
    text = dot.poset_to_dot(poset, poset_width(poset))
    # solid inclusion edge from the smaller residual to the larger one
    assert '"{1}" -> "{}";' in text
    assert '"{}" -> "{1}" [style=dotted, label="1"];' in text
    assert "fillcolor" in text


def test_product_dot_marks_bad_edges():
    aut, arena, _ = gen_figure1()
    text = dot.product_to_dot(build_residual_product(arena, minimize(aut)))
    assert "style=dashed, color=red" in text


# -- CLI ----------------------------------------------------------------------

@pytest.fixture
def files(tmp_path):
    aut, arena, _ = gen_figure1()
    paths = {
        "obj": tmp_path / "obj.json",
        "arena": tmp_path / "arena.json",
        "adam": tmp_path / "adam.json",
        "g3": tmp_path / "g3.json",
    }
    paths["obj"].write_text(io.dumps(io.automaton_to_dict(aut)))
    paths["arena"].write_text(io.dumps(io.arena_to_dict(arena)))
    paths["adam"].write_text(io.dumps(io.arena_to_dict(arena.with_owner("v1", "Adam"))))
    paths["g3"].write_text(io.dumps(io.automaton_to_dict(gen_generalized_safety(3))))
    return {k: str(v) for k, v in paths.items()}


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_residuals(capsys, files, tmp_path):
    code, out, _ = _run(capsys, "residuals", "-o", files["g3"], "--format", "json")
    assert code == 0 and json.loads(out)["width"] == 3
    energy = tmp_path / "e5.json"
    assert main(["gen", "energy", "--cap", "5", "--out", str(energy)]) == 0
    code, out, _ = _run(capsys, "residuals", "-o", str(energy))
    assert code == 0 and json.loads(out)["width"] == 1
    for fmt in ("dot", "table"):
        assert _run(capsys, "residuals", "-o", files["g3"], "--format", fmt)[0] == 0


def test_cli_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, _, err = _run(capsys, "residuals", "-o", str(bad))
    assert code == 2 and "malformed JSON" in err


def test_cli_field_error(capsys, tmp_path):
    data = io.automaton_to_dict(gen_generalized_safety(1))
    data["extra"] = 1
    path = tmp_path / "x.json"
    path.write_text(json.dumps(data))
    code, _, err = _run(capsys, "width", "-o", str(path))
    assert code == 2 and "extra" in err


def test_cli_solve(capsys, files, tmp_path):
    out_path = tmp_path / "s.json"
    code, out, _ = _run(capsys, "solve", "-a", files["arena"], "-o", files["obj"], "--v0", "v0",
                        "--verify", "--out", str(out_path))
    assert code == 0 and json.loads(out)["memory_size"] == 2
    code, out, _ = _run(capsys, "verify", "-a", files["arena"], "-o", files["obj"],
                        "-s", str(out_path), "--v0", "v0")
    assert code == 0 and json.loads(out)["result"] == "Winning"
    code, out, _ = _run(capsys, "solve", "-a", files["adam"], "-o", files["obj"], "--v0", "v0",
                        "--algo", "chain")
    assert code == 1 and json.loads(out)["winner"] == "Adam"
    code, _, _ = _run(capsys, "solve", "-a", files["arena"], "-o", files["g3"], "--v0", "v0")
    assert code == 2


def test_cli_verify_losing(capsys, files, tmp_path):
    aut, arena, _ = gen_figure1()
    strat = MealyStrategy.positional(arena, {"v1": Edge("v1", "v2", "a")})
    path = tmp_path / "p.json"
    path.write_text(io.dumps(io.strategy_to_dict(strat, arena)))
    code, out, _ = _run(capsys, "verify", "-a", files["arena"], "-o", files["obj"],
                        "-s", str(path), "--v0", "v0")
    assert code == 1
    assert len(json.loads(out)["counterexample"]["colors"]) == 2


def test_cli_malformed_strategy(capsys, files, tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"memory": {"states": [1], "initial": 1, "update": []}, "next": []}))
    code, _, _ = _run(capsys, "verify", "-a", files["arena"], "-o", files["obj"],
                      "-s", str(path), "--v0", "v0")
    assert code == 2


def test_cli_synthesize(capsys, files):
    code, out, _ = _run(capsys, "synthesize", "-a", files["arena"], "-o", files["obj"],
                        "--v0", "v0", "--algo", "chain")
    data = json.loads(out)
    assert code == 0 and data["memory_size"] == 2 and data["labels"]
    io.strategy_from_dict(data)


def test_cli_lowerbound(capsys, files, tmp_path):
    g2 = tmp_path / "g2.json"
    main(["gen", "gensafety", "--k", "2", "--out", str(g2)])
    out_dir = tmp_path / "lb"
    code, out, _ = _run(capsys, "lowerbound", "-o", str(g2), "--out-dir", str(out_dir))
    assert code == 0
    assert out.strip() == "width=2, witness=OK, option-uniqueness=OK"
    assert {p.name for p in out_dir.iterdir()} == {"arena.json", "objective.json", "strategy.json"}
    code, out, _ = _run(capsys, "bruteforce-mem", "-a", str(out_dir / "arena.json"),
                        "-o", str(out_dir / "objective.json"), "--v0", "v0")
    assert code == 0 and out.strip() == "2"

    e3 = tmp_path / "e3.json"
    main(["gen", "energy", "--cap", "3", "--out", str(e3)])
    code, out, err = _run(capsys, "lowerbound", "-o", str(e3))
    assert code == 0 and out.startswith("width=1") and "trivial" in err

    g4 = tmp_path / "g4.json"
    main(["gen", "gensafety", "--k", "4", "--out", str(g4)])
    code, out, _ = _run(capsys, "lowerbound", "-o", str(g4))
    assert out.strip() == "width=6, witness=OK, option-uniqueness=OK"


def test_cli_bruteforce_not_found(capsys, files):
    code, out, _ = _run(capsys, "bruteforce-mem", "-a", files["arena"], "-o", files["obj"],
                        "--v0", "v0", "--max-m", "1", "--no-prune")
    assert code == 1 and out.strip() == "NotFound"


def test_cli_gen_formats(capsys):
    for argv in (["gensafety", "--k", "2"], ["outbidding", "--n", "3"],
                 ["counter", "--n", "4", "--actions", "inc,half"], ["figure1"]):
        code, out, _ = _run(capsys, "gen", *argv)
        assert code == 0
        json.loads(out)
        code, out, _ = _run(capsys, "gen", *argv, "--dot")
        assert code == 0 and out.startswith("digraph")
    assert _run(capsys, "gen", "gensafety", "--k", "40")[0] == 2


def test_cli_deterministic(capsys, files):
    runs = [_run(capsys, "synthesize", "-a", files["arena"], "-o", files["obj"], "--v0", "v0")[1]
            for _ in range(2)]
    assert runs[0] == runs[1]
    runs = [_run(capsys, "residuals", "-o", files["g3"], "--format", "dot")[1] for _ in range(2)]
    assert runs[0] == runs[1]


def test_cli_chain_matches_library(capsys, files):
    aut, arena, v0 = gen_figure1()
    expected = io.synthesis_to_dict(synthesize_chain_cover(arena, aut, v0), arena)
    _, out, _ = _run(capsys, "synthesize", "-a", files["arena"], "-o", files["obj"],
                     "--v0", "v0", "--algo", "chain")
    assert json.loads(out) == json.loads(io.dumps(expected))


def test_module_entry_point_version():
    proc = subprocess.run([sys.executable, "-m", "safemem", "--version"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("safemem ")
