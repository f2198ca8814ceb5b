from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from apgame.cli import GRAMMAR, parse_and_run
from apgame.lab import read_csv
from apgame.referee import Transcript, replay


def run(argv, capsys, stdin=None):
    out = io.StringIO() if stdin is not None else None
    code = parse_and_run(argv, stdin, out)
    cap = capsys.readouterr()
    return code, cap.out, cap.err, out


def test_solve_prints_maker(capsys):
    code, out, _, _ = run(["solve", "--n", "5", "--q", "1"], capsys)
    assert code == 0 and out == "maker\n"


def test_solve_threshold(capsys):
    code, out, _, _ = run(["solve", "--n", "12", "--threshold"], capsys)
    assert code == 0 and out == "2\n"
    code, out, _, _ = run(["solve", "--n", "8", "--family", "schur"], capsys)
    assert out == "2\n"


def test_solve_too_large(capsys):
    code, _, err, _ = run(["solve", "--n", "40", "--q", "2"], capsys)
    assert code == 1 and "guard" in err


def test_play_writes_transcript(tmp_path, capsys):
    path = tmp_path / "t.json"
    argv = ["play", "--n", "1000", "--q", "40", "--maker", "mid-third", "--breaker", "three-interval", "--seed", "7", "--out", str(path)]
    code, out, _, _ = run(argv, capsys)
    assert code == 0 and out.strip() in ("maker", "breaker")
    tr = Transcript.from_json(path.read_text())
    assert replay(tr).valid and tr.winner == out.strip()
    first = path.read_bytes()
    run(argv, capsys)
    assert path.read_bytes() == first


@pytest.mark.parametrize(
    "argv",
    [
        ["play", "--n", "10", "--q", "0", "--maker", "greedy", "--breaker", "random"],
        ["play", "--n", "0", "--q", "1", "--maker", "greedy", "--breaker", "random"],
        ["play", "--n", "10", "--q", "1", "--maker", "nope", "--breaker", "random"],
        ["play", "--n", "10", "--q", "1", "--maker", "greedy", "--breaker", "nope"],
        ["play", "--n", "10", "--q", "1", "--maker", "greedy", "--breaker", "random", "--family", "5ap"],
        ["play", "--n", "10", "--q", "1", "--maker", "greedy", "--breaker", "random", "--out", "/no/such/dir/t.json"],
        ["play", "--n", "10", "--q", "1", "--maker", "mid-third", "--breaker", "random", "--family", "schur"],
        ["solve", "--n", "0"],
        ["bounds", "--n", "0"],
        ["verify", "--suite", "nope"],
        ["sweep", "--n-list", "10", "--q-rule", "bogus", "--pairs", "greedy:random", "--seeds", "1", "--out", "x.csv"],
    ],
)
def test_domain_errors(argv, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, err, _ = run(argv, capsys)
    assert code == 1 and "error" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["play", "--n", "10"],
        ["solve", "--n", "x"],
        ["sweep", "--out", "x.csv"],
        ["sweep", "--plan", "p.json", "--n-list", "3", "--out", "x.csv"],
    ],
)
def test_usage_errors_print_grammar(argv, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, err, _ = run(argv, capsys)
    assert code == 1
    assert GRAMMAR in err


def test_bounds_lines(capsys):
    code, out, _, _ = run(["bounds", "--n", "1000000"], capsys)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 8
    values = dict(line.split() for line in lines)
    assert float(values["paper-lower"]) == pytest.approx(422.65, abs=0.01)
    assert float(values["beck-kap:3"]) == pytest.approx(288.675, abs=1e-3)


def test_bounds_n1_marks_undefined(capsys):
    code, out, _, _ = run(["bounds", "--n", "1"], capsys)
    assert code == 0 and "krss-lower undefined" in out


def test_sweep_inline(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, text, _, _ = run(
        ["sweep", "--n-list", "100,1000", "--q-rule", "krss-upper", "--pairs", "mid-third:block-all,random:random", "--seeds", "1..3", "--out", str(out), "--workers", "2"],
        capsys,
    )
    assert code == 0 and text.startswith("12 games")
    assert len(read_csv(out)) == 12


def test_sweep_plan_file(tmp_path, capsys):
    plan = tmp_path / "plan.json"
    plan.write_text(json.dumps({"n_list": [200], "q_rule": ["q=2,30"], "pairs": [["greedy", "three-interval"]], "seeds": [0]}))
    out = tmp_path / "s.csv"
    code, _, _, _ = run(["sweep", "--plan", str(plan), "--out", str(out)], capsys)
    assert code == 0 and [r.q for r in read_csv(out)] == [2, 30]


def test_sweep_bad_plan(tmp_path, capsys):
    plan = tmp_path / "plan.json"
    plan.write_text("{not json")
    code, _, _, _ = run(["sweep", "--plan", str(plan), "--out", str(tmp_path / "s.csv")], capsys)
    assert code == 1


def test_verify_single_suite(capsys):
    code, out, _, _ = run(["verify", "--suite", "profile"], capsys)
    assert code == 0 and out.startswith("PASS profile")


def test_verify_failure_exit_code(capsys, monkeypatch):
    from apgame import checks

    monkeypatch.setitem(checks.SUITES, "profile", lambda: checks.CheckResult("profile", False, "forced"))
    code, out, _, _ = run(["verify", "--suite", "profile"], capsys)
    assert code == 2 and out.startswith("FAIL")


class TestInteractive:
    def test_human_maker_wins(self, capsys, tmp_path):
        path = tmp_path / "t.json"
        argv = ["play", "--n", "9", "--q", "1", "--maker", "greedy", "--breaker", "block-all", "--interactive", "maker", "--out", str(path)]
        stdin = io.StringIO("4\n5\n6\n")
        code, out, _, prompts = run(argv, capsys, stdin)
        assert code == 0 and out == "maker\n"
        assert "open threats (1): 6" in prompts.getvalue()
        tr = Transcript.from_json(path.read_text())
        assert tr.config.maker == "human" and tr.winning_set == (4, 5, 6)

    def test_invalid_input_reprompts(self, capsys):
        argv = ["play", "--n", "9", "--q", "1", "--maker", "greedy", "--breaker", "block-all", "--interactive", "maker"]
        stdin = io.StringIO("abc\n0\n4 5\n4\n4\n5\n6\n")
        code, out, _, prompts = run(argv, capsys, stdin)
        text = prompts.getvalue()
        assert code == 0
        assert "invalid: positions must be integers" in text
        assert "invalid: 0 is outside 1..9" in text
        assert "invalid: expected 1 position(s), got 2" in text
        assert "invalid: 4 is already claimed" in text

    def test_human_breaker(self, capsys):
        argv = ["play", "--n", "6", "--q", "2", "--maker", "greedy", "--breaker", "x", "--interactive", "breaker"]
        # greedy opens on 1 (all scores tie at 0), so "1 2" is rejected
        stdin = io.StringIO("1 2\n2,3\n5 6\n")
        code, out, _, prompts = run(argv, capsys, stdin)
        assert code == 0 and out == "breaker\n"
        assert "Maker played 1" in prompts.getvalue()
        assert "invalid: 1 is already claimed" in prompts.getvalue()

    def test_session_replays_to_same_transcript(self, tmp_path, capsys):
        lines = "5\n6\n2\n3\n8\n9\n1\n"
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for p in paths:
            argv = ["play", "--n", "9", "--q", "1", "--maker", "greedy", "--breaker", "three-interval", "--interactive", "maker", "--out", str(p)]
            run(argv, capsys, io.StringIO(lines))
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_input_ends(self, capsys):
        argv = ["play", "--n", "30", "--q", "1", "--maker", "greedy", "--breaker", "block-all", "--interactive", "maker"]
        code, _, err, _ = run(argv, capsys, io.StringIO("10\n"))
        assert code == 1 and "input ended" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "apgame", "solve", "--n", "5", "--q", "1"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "maker\n"
