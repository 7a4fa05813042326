"""
Unit tests for the relational logic: assertions, judgments and derivations.

Tests cover:
    - Assertion atoms, inclusion and the basic-relation flag
    - Lifted assertions decided through the divergence, Undecidable otherwise
    - The effectful axiom's exact budget
    - Bundled judgment scenarios against their expected verdicts
    - Judgments whose precondition outgrows max_cases stay inconclusive
    - Derivation scripts: the two cost examples, a bad return, a tampered claim
    - Bind over noise that leaves the R window: continuations judged where the noise lands
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import pytest

from divlog.acrl import (
    axiom_effectful,
    build_assertion,
    derive,
    equality,
    includes,
    judge_semantic,
    lifted,
    make_judgment,
    sup_over,
)
from divlog.divergences.privacy import dp_spec
from divlog.divergences.statistical import TV_WEIGHT, fdiv_spec
from divlog.errors import ParseError, PreconditionFailed, TermTypeError, Undecidable
from divlog.metalang import REAL, UNIT, MonadicType, parse_term
from divlog.monads import get_monad
from divlog.monads.dist import Dist
from divlog.schemas import DerivationFile, load_derivation, load_scenario

SCENARIOS = Path(__file__).resolve().parents[2] / "scenarios"

U, D = [("u", REAL)], [("d", REAL)]

# ═══════════════════════════════════════════════════════════════════════════
# Assertions
# ═══════════════════════════════════════════════════════════════════════════


class TestAssertions:
    """Tests for assertions over R = {0, …, 4}."""

    def test_successor_pairs(self, signature):
        succ = build_assertion("(succ 1 u d)", U, D, signature)
        assert [(g["u"], d["d"]) for g, d in succ.pairs()] == [(0, 1), (1, 2), (2, 3), (3, 4)]

    def test_distance_pairs(self, signature):
        near = build_assertion("(diff 1 u d)", U, D, signature)
        assert len(list(near.pairs())) == 13

    def test_inclusion(self, signature):
        succ = build_assertion("(succ 1 u d)", U, D, signature)
        near = build_assertion("(diff 1 u d)", U, D, signature)
        assert includes(near, succ) == (True, None)
        ok, witness = includes(succ, near)
        assert not ok
        assert witness == ({"u": 0}, {"d": 0})

    def test_connectives(self, signature):
        both = build_assertion("(and (diff 1 u d) (not (eq u d)))", U, D, signature)
        assert len(list(both.pairs())) == 8

    def test_basic_flag(self, signature):
        assert build_assertion("(eq u d)", U, D, signature).basic == "eq"
        assert build_assertion("(eq (add u 0) d)", U, D, signature).basic is None

    def test_unknown_form(self, signature):
        with pytest.raises(ParseError):
            build_assertion("(near u d)", U, D, signature)

    def test_atom_types_must_agree(self, signature):
        with pytest.raises(TermTypeError):
            build_assertion("(eq u d)", U, [("d", UNIT)], signature)


class TestLiftedAssertions:
    """⌈T,Δ⌉(m, v)ψ membership."""

    def test_decided_by_divergence(self, signature):
        post = lifted(dp_spec(), Fraction(1), Fraction(1, 6), equality(signature, REAL))
        nu1 = Dist.of({Fraction(0): Fraction(1, 2), Fraction(1): Fraction(1, 2)})
        nu2 = Dist.of({Fraction(0): Fraction(1, 3), Fraction(1): Fraction(2, 3)})
        assert post.holds({"u": nu1}, {"d": nu2})
        tighter = lifted(dp_spec(), Fraction(1), Fraction(1, 7), equality(signature, REAL))
        assert not tighter.holds({"u": nu1}, {"d": nu2})

    def test_non_basic_inner_is_undecidable(self, signature):
        succ = build_assertion("(succ 1 u d)", U, D, signature)
        post = lifted(dp_spec(), Fraction(1), Fraction(0), succ)
        with pytest.raises(Undecidable):
            post.holds({"u": Dist.dirac(Fraction(0))}, {"d": Dist.dirac(Fraction(1))})


# ═══════════════════════════════════════════════════════════════════════════
# Judgments
# ═══════════════════════════════════════════════════════════════════════════


class TestJudgments:
    """Tests for the effectful axiom, divergence suprema and scenario files."""

    @pytest.fixture
    def near(self, signature):
        return build_assertion("(diff 1 u d)", U, D, signature)

    def test_geometric_axiom_budget(self, near):
        budget, judgment = axiom_effectful("geo", near, dp_spec(), grade=Fraction(2))
        assert budget == 0
        assert judgment.grade == (Fraction(2), 0)

    def test_smaller_grade_costs_budget(self, near):
        budget, _ = axiom_effectful("geo", near, dp_spec(), grade=Fraction(3, 2))
        assert budget > 0

    def test_axiom_needs_effectful_op(self, near):
        with pytest.raises(PreconditionFailed):
            axiom_effectful("add", near, dp_spec())

    def test_sup_over_equal_inputs(self, signature):
        same = build_assertion("(eq u d)", U, D, signature)
        left, right = parse_term("(geo u)", signature), parse_term("(geo d)", signature)
        assert sup_over(fdiv_spec(TV_WEIGHT), None, same, left, right) == 0

    def test_postcondition_must_match_result_types(self, signature, near):
        left, right = parse_term("(geo u)", signature), parse_term("(geo d)", signature)
        with pytest.raises(TermTypeError):
            make_judgment(near, left, right, equality(signature, REAL))

    @pytest.mark.parametrize("name", ["geometric_dp", "case_a_budget_1", "case_a_budget_half"])
    def test_scenarios(self, name, budget):
        scenario = load_scenario(SCENARIOS / f"{name}.json")
        _, verdict = scenario.judge(budget)
        assert verdict.verdict == scenario.expect
        assert verdict.exhaustive

    def test_failing_scenario_reports_sides(self, budget):
        _, verdict = load_scenario(SCENARIOS / "case_a_budget_half.json").judge(budget)
        assert (verdict.lhs, verdict.rhs) == (1, Fraction(1, 2))

    def test_judgment_types(self, signature, near):
        _, judgment = axiom_effectful("geo", near, dp_spec(), grade=Fraction(2))
        assert judgment.post.left == (("u", MonadicType(REAL)),)


# ═══════════════════════════════════════════════════════════════════════════
# Derivations
# ═══════════════════════════════════════════════════════════════════════════


class TestDerivations:
    """Scripts are replayed and every budget recomputed."""

    @pytest.mark.parametrize("name", ["case_a_derivation", "case_b_derivation", "invalid_return"])
    def test_expected_verdicts(self, name, budget):
        file = load_derivation(SCENARIOS / f"{name}.json")
        assert derive(file.to_script(), budget).verdict == file.expect

    def test_case_a_budget_and_cross_check(self, budget):
        report = derive(load_derivation(SCENARIOS / "case_a_derivation.json").to_script(), budget, verify=True)
        assert report.conclusion.grade == (None, 1)
        assert report.cross_check.holds

    def test_case_b_budget(self, budget):
        report = derive(load_derivation(SCENARIOS / "case_b_derivation.json").to_script(), budget)
        assert report.conclusion.grade == (None, Fraction(1, 5))

    def test_bad_return_located(self, budget):
        report = derive(load_derivation(SCENARIOS / "invalid_return.json").to_script(), budget)
        assert (report.failed_index, report.failed_step) == (1, "ret")
        assert "claimed budget" in report.reason

    def test_tampered_bind_claim(self, budget):
        file = load_derivation(SCENARIOS / "case_a_derivation.json")
        index = next(i for i, s in enumerate(file.steps) if s.id == "main")
        file.steps[index] = file.steps[index].model_copy(update={"budget": "1/2"})
        report = derive(file.to_script(), budget)
        assert not report.valid
        assert report.failed_step == "main"
        assert report.to_dict()["invalid_step"]["index"] == index

    @pytest.mark.parametrize("name", ["case_a_derivation", "case_b_derivation"])
    def test_valid_conclusion_holds_semantically(self, name, budget):
        report = derive(load_derivation(SCENARIOS / f"{name}.json").to_script(), budget, verify=True)
        assert report.valid
        assert report.cross_check.holds


# ═══════════════════════════════════════════════════════════════════════════
# Bind past the carrier
# ═══════════════════════════════════════════════════════════════════════════


def noisy_bind(noise: str, left: str, right: str) -> DerivationFile:
    """Add noise to u and d, then a pure continuation on the noisy value."""
    extended = {
        "left_context": [["u", "R"], ["x", "R"]],
        "right_context": [["d", "R"], ["x'", "R"]],
        "pre": "(and (succ 1 u d) (succ 1 x x'))",
    }
    return DerivationFile.model_validate({
        "monad": "dist",
        "divergence": "tv",
        "steps": [
            {"id": "noise", "rule": "transport", "left_context": [["u", "R"]], "right_context": [["d", "R"]],
             "pre": "(succ 1 u d)", "left": noise.format("u"), "right": noise.format("d"), "post": "(succ 1 u d)"},
            {"id": "after", "rule": "pure", **extended, "left": left, "right": right, "post": "(eq u d)"},
            {"id": "ret", "rule": "return", "premises": ["after"]},
            {"id": "main", "rule": "bind", "premises": ["noise", "ret"], "var_left": "x", "var_right": "x'"},
        ],
    })


NOISE = pytest.mark.parametrize("noise", ["(lap {} 5)", "(norm {} 4)"], ids=["lap", "norm"])


class TestBindPastCarrier:
    """lap and norm move inputs out of R = {0..4}; bind must judge the continuation there too."""

    @NOISE
    def test_continuation_equal_everywhere(self, noise, budget):
        report = derive(noisy_bind(noise, "(sub x u)", "(sub x' d)").to_script(), budget, verify=True)
        assert report.valid
        assert report.conclusion.grade == (None, 0)
        assert report.cross_check.holds

    @NOISE
    def test_continuation_equal_only_on_r_is_rejected(self, noise, budget):
        # agrees while x' <= 4, differs at x = 5, x' = 6
        report = derive(noisy_bind(noise, "(min x 5)", "(sub (min x' 5) 1)").to_script(), budget)
        assert not report.valid
        assert report.failed_step == "main"
        assert "outside the carrier" in report.reason

    def test_rejected_conclusion_would_fail_semantically(self, signature, budget):
        monad = get_monad("dist")
        near = build_assertion("(succ 1 u d)", U, D, signature)
        left = parse_term("(let (x (lap u 5)) (ret (min x 5)))", signature)
        right = parse_term("(let (x' (lap d 5)) (ret (sub (min x' 5) 1)))", signature)
        post = lifted(fdiv_spec(TV_WEIGHT), None, 0, equality(signature, REAL))
        verdict = judge_semantic(make_judgment(near, left, right, post), monad, budget)
        assert verdict.verdict == "fails"


# ═══════════════════════════════════════════════════════════════════════════
# Truncated preconditions
# ═══════════════════════════════════════════════════════════════════════════


class TestTruncatedJudgment:
    """A check that stops at max_cases never reports holds."""

    @pytest.fixture
    def everywhere(self, signature):
        _, judgment = axiom_effectful("geo", build_assertion("(true)", U, D, signature), fdiv_spec(TV_WEIGHT))
        return judgment

    def test_all_pairs_checked_holds(self, everywhere, budget):
        verdict = judge_semantic(everywhere, get_monad("dist"), budget)
        assert verdict.holds
        assert verdict.cases == 25

    def test_truncated_is_inconclusive(self, everywhere, budget):
        verdict = judge_semantic(everywhere, get_monad("dist"), budget.replace(max_cases=3))
        assert verdict.verdict == "inconclusive"
        assert not verdict.exhaustive
        assert verdict.cases == 3
