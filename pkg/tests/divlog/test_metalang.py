"""
Unit tests for the computational metalanguage.

Tests cover:
    - Reader and term parser, with source positions on errors
    - Signature declarations from the s-expression form
    - Typing rules for values, effects, sums and let
    - Capture-avoiding substitution and printing
    - Interpretation in Dist and D(C × −), and semantic comparison
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import pytest

from divlog.errors import (
    ParseError,
    PreconditionFailed,
    SignatureError,
    TermTypeError,
    UnboundVariable,
    UnsupportedEffect,
)
from divlog.metalang import (
    REAL,
    MonadicType,
    format_term,
    free_vars,
    interpret,
    parse_program,
    parse_signature,
    parse_term,
    parse_type,
    run_program,
    semantically_equal,
    substitute,
    typecheck,
)
from divlog.metalang.signature import default_signature
from divlog.metalang.syntax import Var
from divlog.metalang.types import ArrowType, ProductType, SumType
from divlog.monads.cost import DIST_COST, CostComp, cost_marginal
from divlog.monads.dist import DIST, Dist

SCENARIOS = Path(__file__).resolve().parents[2] / "scenarios"

# ═══════════════════════════════════════════════════════════════════════════
# Parsing
# ═══════════════════════════════════════════════════════════════════════════


class TestParsing:
    """Tests for types, terms and signature forms."""

    def test_types(self):
        assert parse_type("(* R R)") == ProductType(REAL, REAL)
        assert parse_type("(-> R R R)") == ArrowType(REAL, ArrowType(REAL, REAL))
        assert parse_type("(T (+ R 1))") == MonadicType(SumType(REAL, parse_type("1")))

    def test_operation_arguments_are_paired(self, signature):
        term = parse_term("(add x 1)", signature)
        assert format_term(term) == "(add (pair x 1))"

    def test_format_parses_back(self, signature):
        text = "(let (s (geo x)) (ret (match (inl s R) (u u) (v (neg v)))))"
        term = parse_term(text, signature)
        assert parse_term(format_term(term), signature) == term

    @pytest.mark.parametrize(
        "text, position",
        [("(ret x", "1:1"), ("(lambda (x R))", "1:1"), ("(pair 1\n  (fst))", "2:3"), ("x)", "1:2")],
        ids=["unclosed", "lambda-body", "fst-arity", "stray-paren"],
    )
    def test_errors_carry_position(self, text, position, signature):
        with pytest.raises(ParseError) as info:
            parse_term(text, signature)
        assert str(info.value).startswith(position)

    def test_signature_form(self):
        sig = parse_signature(
            "(signature (base R (range 0 2)) (effect-op noise (* R R) R (impl lap) (window 2)))"
        )
        assert sig.bases["R"].elements == (0, 1, 2)
        assert sig.effect_ops["noise"].params["window"] == 2

    def test_value_op_cannot_use_effectful_impl(self):
        with pytest.raises(SignatureError):
            parse_signature("(signature (value-op geo R R))")

    def test_operations_need_first_order_types(self):
        with pytest.raises(SignatureError):
            parse_signature("(signature (effect-op f (-> R R) R (impl geo)))")


# ═══════════════════════════════════════════════════════════════════════════
# Typing
# ═══════════════════════════════════════════════════════════════════════════


class TestTyping:
    """Tests for the typing rules."""

    def test_effect_returns_computation(self, signature):
        term = parse_term("(geo x)", signature)
        assert typecheck(signature, {"x": REAL}, term) == MonadicType(REAL)

    def test_let_sequences_computations(self, signature):
        term = parse_term("(let (s (geo x)) (t (geo s)) (ret (pair s t)))", signature)
        assert typecheck(signature, {"x": REAL}, term) == MonadicType(ProductType(REAL, REAL))

    def test_unbound_variable(self, signature):
        with pytest.raises(UnboundVariable):
            typecheck(signature, None, parse_term("(neg y)", signature))

    @pytest.mark.parametrize(
        "text",
        ["(add 1 'a)", "(let (s (geo x)) s)", "(fst x)", "(match x (u u) (v v))", "(let (s x) (ret s))"],
        ids=["symbol-arg", "pure-let-body", "projection", "match-non-sum", "pure-bound"],
    )
    def test_ill_typed(self, text, signature):
        with pytest.raises(TermTypeError):
            typecheck(signature, {"x": REAL}, parse_term(text, signature))


# ═══════════════════════════════════════════════════════════════════════════
# Substitution
# ═══════════════════════════════════════════════════════════════════════════


class TestSubstitution:
    """Tests for capture-avoiding substitution."""

    def test_binder_is_renamed(self, signature):
        term = parse_term("(lambda (y R) (add x y))", signature)
        result = substitute(term, {"x": Var("y")})
        assert free_vars(result) == frozenset({"y"})
        assert result.var != "y"

    def test_bound_occurrences_untouched(self, signature):
        term = parse_term("(let (x (geo 1)) (ret x))", signature)
        assert substitute(term, {"x": parse_term("3", signature)}) == term


# ═══════════════════════════════════════════════════════════════════════════
# Interpretation
# ═══════════════════════════════════════════════════════════════════════════


class TestInterpretation:
    """Tests for the monadic interpreter."""

    def test_pure_terms_need_no_monad(self, signature):
        assert interpret(signature, None, parse_term("((lambda (x R) (mul x x)) 3)", signature)) == 9
        assert interpret(signature, None, parse_term("(match (inl 1 R) (u (add u 1)) (v v))", signature)) == 2

    def test_effect_without_monad(self, signature):
        with pytest.raises(UnsupportedEffect):
            interpret(signature, None, parse_term("(geo 1)", signature))

    def test_geometric_noise_in_dist(self, signature):
        result = interpret(signature, DIST, parse_term("(geo 2)", signature))
        assert isinstance(result, Dist)
        assert result.mass == 1
        assert result.prob(Fraction(2)) == Fraction(1, 3)

    def test_tick_needs_a_cost_monad(self, signature):
        with pytest.raises(UnsupportedEffect):
            interpret(signature, DIST, parse_term("(tick 1)", signature))

    def test_left_unit_law_semantically(self, signature):
        left = parse_term("(let (s (ret x)) (geo s))", signature)
        right = parse_term("(geo x)", signature)
        assert semantically_equal(signature, DIST, [("x", REAL)], left, right) is None

    def test_semantic_difference_reports_environment(self, signature):
        left, right = parse_term("(geo x)", signature), parse_term("(ret x)", signature)
        assert semantically_equal(signature, DIST, [("x", REAL)], left, right) == {"x": Fraction(0)}


class TestPrograms:
    """The bundled noisy-sum program run in D(C × −)."""

    @pytest.fixture
    def program(self):
        text = (SCENARIOS / "noisy_sum.dl").read_text(encoding="utf-8")
        return parse_program(text, default_signature())

    def test_noise_and_ticks(self, program):
        result = run_program(program, DIST_COST, {"a": Fraction(1), "b": Fraction(2)})
        assert result.mass == 1
        assert result.prob(CostComp(Fraction(0), Fraction(3))) == Fraction(1, 3)
        assert cost_marginal(result).prob(Fraction(3)) == Fraction(1, 12)

    def test_missing_input(self, program):
        with pytest.raises(PreconditionFailed):
            run_program(program, DIST_COST, {"a": Fraction(1)})

    def test_inline_signature(self):
        program = parse_program(
            "(signature (base R (range 0 3)) (value-op plus (* R R) R (impl add)))\n"
            "(input (r R))\n"
            "(main (plus r 1))"
        )
        assert run_program(program, None, {"r": Fraction(2)}) == 3
