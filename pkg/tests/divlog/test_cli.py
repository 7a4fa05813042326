"""
Unit tests for the command-line driver.

Tests cover:
    - Report shape, determinism and optional timing
    - Exit codes per verdict, usage errors and input errors
    - --lhs/--rhs read in the divergence's monad, malformed values exit 65
    - Each subcommand on the bundled scenarios
    - Text and JSON rendering through main
"""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from divlog.cli import EXIT_FAILED, EXIT_INPUT, EXIT_OK, EXIT_USAGE, main, run_command
from divlog.encoding import dumps

SCENARIOS = Path(__file__).resolve().parents[2] / "scenarios"

SMALL = ["--max-carrier", "2", "--grid-denom", "2", "--cost-bound", "2", "--depth", "2"]
NU1 = '[[0, "1/2"], [1, "1/2"]]'
NU2 = '[[0, "1/3"], [1, "2/3"]]'
EVAL_TV = [*SMALL, "eval", "--div", "tv", "--lhs", NU1, "--rhs", NU2]


# ═══════════════════════════════════════════════════════════════════════════
# Reports
# ═══════════════════════════════════════════════════════════════════════════


class TestReports:
    """Shape of the JSON report."""

    def test_eval_report(self):
        code, report = run_command(EVAL_TV)
        assert code == EXIT_OK
        assert report["schema_version"] == "divlog.report/1"
        assert report["verdict"] == "ok"
        assert report["command"] == EVAL_TV
        assert report["results"]["value"] == "1/6"
        assert report["config"]["grid_denom"] == 2
        assert "timing" not in report

    def test_deterministic(self):
        _, first = run_command(EVAL_TV)
        _, second = run_command(EVAL_TV)
        assert dumps(first) == dumps(second)

    def test_timing_flag(self):
        _, report = run_command(["--timing", *EVAL_TV])
        assert report["timing"]["seconds"] >= 0

    def test_save_writes_report(self, tmp_path, monkeypatch):
        monkeypatch.setenv("DIVLOG_REPORT_DIR", str(tmp_path))
        _, report = run_command(["--save", *EVAL_TV])
        saved = json.loads((tmp_path / "eval.json").read_text(encoding="utf-8"))
        assert saved == report


# ═══════════════════════════════════════════════════════════════════════════
# Exit codes
# ═══════════════════════════════════════════════════════════════════════════


class TestExitCodes:
    """Verdicts map to 0/1, bad invocations to 64 and bad inputs to 65."""

    @pytest.mark.parametrize(
        "argv",
        [
            ["frobnicate"],
            ["eval", "--div", "tv"],
            ["--max-cases", "0", *EVAL_TV[len(SMALL):]],
            [*SMALL, "eval", "--div", "tv", "--lhs", "[[0, ", "--rhs", NU2],
            [*SMALL, "run", str(SCENARIOS / "noisy_sum.dl"), "--reals", "four"],
        ],
        ids=["unknown-command", "missing-flag", "settings-validator", "bad-json", "bad-window"],
    )
    def test_usage_errors(self, argv):
        code, report = run_command(argv)
        assert code == EXIT_USAGE
        assert report["verdict"] == "error"
        assert report["results"]["error"]["type"] == "UsageError"

    @pytest.mark.parametrize(
        "argv",
        [
            [*SMALL, "eval", "--div", "js", "--lhs", NU1, "--rhs", NU2],
            [*SMALL, "judge", str(SCENARIOS / "missing.json")],
            [*SMALL, "run", str(SCENARIOS / "noisy_sum.dl"), "--monad", "giry"],
            [*SMALL, "eval", "--div", "tv", "--lhs", "[[0]]", "--rhs", NU2],
            [*SMALL, "eval", "--div", "tv", "--lhs", '{"dist": 3}', "--rhs", NU2],
            [*SMALL, "eval", "--div", "tv", "--lhs", '{"cost": 1, "value": 0}', "--rhs", NU2],
            [*SMALL, "eval", "--div", "c", "--lhs", "[1]", "--rhs", "[3, 0]"],
            [*SMALL, "lift", "refute", "--div", "tv", "--lhs", "[[0, \"x\"]]", "--rhs", NU2],
        ],
        ids=[
            "unknown-divergence", "missing-scenario", "unknown-monad", "short-dist-entry",
            "untagged-dist-payload", "cost-value-for-dist", "short-cost-pair", "bad-weight",
        ],
    )
    def test_input_errors(self, argv):
        code, report = run_command(argv)
        assert code == EXIT_INPUT
        assert report["verdict"] == "error"

    def test_input_error_names_the_flag(self):
        code, report = run_command([*SMALL, "eval", "--div", "tv", "--lhs", NU1, "--rhs", "[[1, 2, 3]]"])
        assert code == EXIT_INPUT
        assert report["results"]["error"]["type"] == "ScenarioError"
        assert "--rhs" in report["results"]["error"]["message"]

    def test_refuted_axioms_exit_one(self):
        code, report = run_command([*SMALL, "axioms", "--div", "c", "--endorel", "eq"])
        assert code == EXIT_FAILED
        assert report["verdict"] == "refuted"
        assert report["results"]["composability"]["verdict"] == "refuted"


# ═══════════════════════════════════════════════════════════════════════════
# Subcommands
# ═══════════════════════════════════════════════════════════════════════════


class TestSubcommands:
    """Each subcommand end to end on small bounds."""

    @pytest.mark.parametrize(
        "name, code",
        [("geometric_dp", EXIT_OK), ("case_a_budget_1", EXIT_OK), ("case_a_budget_half", EXIT_FAILED)],
    )
    def test_judge(self, name, code):
        assert run_command([*SMALL, "judge", str(SCENARIOS / f"{name}.json")])[0] == code

    def test_derive_valid_with_cross_check(self):
        code, report = run_command([*SMALL, "derive", str(SCENARIOS / "case_a_derivation.json"), "--verify"])
        assert code == EXIT_OK
        assert report["verdict"] == "valid"

    def test_derive_locates_bad_step(self):
        code, report = run_command([*SMALL, "derive", str(SCENARIOS / "invalid_return.json")])
        assert code == EXIT_FAILED
        assert report["results"]["derivation"]["invalid_step"]["id"] == "ret"

    def test_eval_reads_values_in_the_divergence_monad(self):
        code, report = run_command([*SMALL, "eval", "--div", "c", "--lhs", "[1, 0]", "--rhs", "[3, 0]"])
        assert code == EXIT_OK
        assert report["results"]["value"] == "2"

    def test_eval_accepts_tagged_distributions(self):
        tagged = json.dumps({"dist": json.loads(NU1)})
        _, report = run_command([*SMALL, "eval", "--div", "tv", "--lhs", tagged, "--rhs", NU2])
        assert report["results"]["value"] == "1/6"

    def test_run_program(self):
        code, report = run_command(
            [*SMALL, "run", str(SCENARIOS / "noisy_sum.dl"), "--monad", "dist-cost", "--env", "a=1", "b=2"]
        )
        assert code == EXIT_OK
        assert report["results"]["env"] == {"a": "1", "b": "2"}
        assert "result" in report["results"]

    def test_qet_gen(self):
        code, report = run_command([*SMALL, "qet", "gen", "--sig", "f:1,a:0", "--lhs", "f(x)", "--rhs", "f(y)"])
        assert code == EXIT_OK
        assert report["results"]["gen"]["value"] == "1/2"

    @pytest.mark.parametrize("metric, code", [("agreement", EXIT_OK), ("depth-weighted", EXIT_FAILED)])
    def test_qet_check(self, metric, code):
        assert run_command([*SMALL, "qet", "check", "--sig", "f:1,a:0", "--metric", metric])[0] == code

    def test_pointwise_demo(self):
        code, report = run_command([*SMALL, "demo", "pointwise-dp"])
        assert code == EXIT_OK
        demo = report["results"]["pointwise-dp"]
        assert (demo["before"], demo["after"]) == ("1/10", "41/50")


# ═══════════════════════════════════════════════════════════════════════════
# main
# ═══════════════════════════════════════════════════════════════════════════


class TestMain:
    """Rendering on stdout."""

    def test_text_output(self, capsys):
        assert main(EVAL_TV) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("verdict: ok")
        assert "value: 1/6" in out

    def test_json_output(self, capsys):
        assert main(["--format", "json", *EVAL_TV]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["results"]["divergence"] == "tv"

    def test_error_output(self, capsys):
        assert main(["--format", "json", "frobnicate"]) == EXIT_USAGE
        assert json.loads(capsys.readouterr().out)["verdict"] == "error"
