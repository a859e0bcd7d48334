import json
import pathlib


from acdterm import ac_equal, parse_term
from acdterm.cli import main

PROGRAMS = pathlib.Path(__file__).parent / "programs"


def prog(name):
    return str(PROGRAMS / name)


def test_run_leq_prints_false(capsys):
    code = main(
        ["run", "-p", prog("leq.acd"), "-g", "leq(X,Y) /\\ leq(Y,Z) /\\ ~leq(X,Z)"]
    )
    out = capsys.readouterr().out.strip()
    assert code == 0
    assert out == "false"


def test_run_unify_reaches_solved_form(capsys):
    code = main(
        ["run", "-p", prog("unify.acd"), "-g", "X = Y /\\ f(f(X)) = X /\\ Y = f(f(f(Y)))"]
    )
    out = capsys.readouterr().out.strip()
    assert code == 0
    assert ac_equal(parse_term(out), parse_term("X = Y /\\ Y = f(Y) /\\ true"))


def test_run_empty_program_echoes_goal(capsys):
    code = main(["run", "-p", prog("empty.acd"), "-g", "a"])
    assert code == 0
    assert capsys.readouterr().out.strip() == "a"


def test_run_goal_file(tmp_path, capsys):
    goal_file = tmp_path / "goal.term"
    goal_file.write_text("not_one(A) /\\ one(A)\n", encoding="utf-8")
    code = main(["run", "-p", prog("one_subst.acd"), "-G", str(goal_file)])
    out = capsys.readouterr().out.strip()
    assert code == 0
    assert ac_equal(parse_term(out), parse_term("(A = 1) /\\ false"))


def test_budget_exhaustion_exit_code(capsys):
    code = main(["run", "-p", prog("loop.acd"), "-g", "f(a)", "--max-steps", "5"])
    assert code == 2
    assert capsys.readouterr().out.strip() == "f(a)"


def test_env_var_max_steps(monkeypatch, capsys):
    monkeypatch.setenv("ACDTERM_MAX_STEPS", "3")
    code = main(["run", "-p", prog("loop.acd"), "-g", "f(a)", "--trace"])
    captured = capsys.readouterr()
    assert code == 2
    assert len(captured.err.strip().splitlines()) == 3


def test_parse_error_exit_code_and_location(tmp_path, capsys):
    bad = tmp_path / "bad.acd"
    bad.write_text("rule @ f(X <=> a.\n", encoding="utf-8")
    code = main(["run", "-p", str(bad), "-g", "a"])
    captured = capsys.readouterr()
    assert code == 1
    assert "bad.acd:1:" in captured.err


def test_goal_parse_error(capsys):
    code = main(["run", "-p", prog("empty.acd"), "-g", "f(a"])
    assert code == 1
    assert "<goal>" in capsys.readouterr().err


def test_trace_text_to_stderr(capsys):
    code = main(
        ["run", "-p", prog("leq.acd"), "-g", "leq(a,a)", "--trace"]
    )
    captured = capsys.readouterr()
    assert code == 0
    assert "#1 simplify reflexivity" in captured.err


def test_trace_json_lines_round_trip(tmp_path, capsys):
    trace_file = tmp_path / "trace.jsonl"
    code = main(
        [
            "run",
            "-p",
            prog("leq.acd"),
            "-g",
            "leq(X,Y) /\\ leq(Y,Z) /\\ ~leq(X,Z)",
            "--trace-out",
            str(trace_file),
            "--format",
            "json-lines",
        ]
    )
    assert code == 0
    lines = trace_file.read_text(encoding="utf-8").strip().splitlines()
    assert len(lines) == 6
    for n, line in enumerate(lines, start=1):
        rec = json.loads(line)
        assert set(rec) == {"n", "kind", "rule", "path", "ids", "goal"}
        assert rec["n"] == n
        assert isinstance(rec["path"], list)
        parse_term(rec["goal"])  # goal field must be re-parseable


def test_print_ids(capsys):
    code = main(["run", "-p", prog("empty.acd"), "-g", "f(a,b)", "--print-ids"])
    out = capsys.readouterr().out.strip()
    assert code == 0
    assert out == "f(a#1,b#2)#3"


def test_check_subcommand(capsys):
    assert main(["check", "-p", prog("leq.acd")]) == 0
    assert "8 rules" in capsys.readouterr().out


def test_check_rejects_bad_program(tmp_path, capsys):
    bad = tmp_path / "bad.acd"
    bad.write_text("f(X) <=> var(Y) | X.\n", encoding="utf-8")
    assert main(["check", "-p", str(bad)]) == 1
    assert "Y" in capsys.readouterr().err


def test_oracle_subcommand(capsys):
    code = main(
        ["oracle", "-p", prog("one_subst.acd"), "-g", "not_one(A) /\\ one(A)"]
    )
    captured = capsys.readouterr()
    assert code == 0
    assert ac_equal(parse_term(captured.out.strip()), parse_term("(A = 1) /\\ false"))
    assert "truncated=false" in captured.err


def test_missing_program_file(capsys):
    assert main(["run", "-p", "no_such.acd", "-g", "a"]) == 1
    assert "no_such.acd" in capsys.readouterr().err


def test_invalid_max_steps(capsys):
    code = main(["run", "-p", prog("empty.acd"), "-g", "a", "--max-steps", "0"])
    assert code == 1
