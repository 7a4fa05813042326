"""
Unit tests for the monads over finite carriers.

Tests cover:
    - Monad laws for every built-in monad on a small grid
    - Dist construction, bind and mass (hypothesis)
    - Supports listed in numeric order, negatives and multi-digit values included
    - Cost-tagged monads: charging and cost accumulation
    - Monad identifiers resolved by get_monad
    - Ω-terms: parsing, substitution and enumeration
    - Monad opfunctors: the inclusion passes, a mass-halving one is rejected
"""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from divlog.core.carriers import Carrier
from divlog.divergences.privacy import dp_spec
from divlog.errors import CarrierMismatch, OpfunctorLawViolation, ParseError, ScenarioError
from divlog.monads import get_monad
from divlog.monads.base import TableMap, check_monad_laws, kleisli, strength
from divlog.monads.cost import COST, DIST_COST, PCOST, CostComp, CostSet, cost_marginal
from divlog.monads.dist import DIST, SUBDIST, Dist, grid_distributions
from divlog.monads.opfunctor import (
    check_opfunctor_laws,
    dist_inclusion,
    identity_opfunctor,
    opfunctor_transfer,
)
from divlog.monads.state import StateFn, StateMonad
from divlog.monads.terms import (
    Op,
    OmegaSignature,
    TermMonad,
    Var,
    enumerate_terms,
    format_term,
    parse_term,
    substitute,
)

weights = st.lists(st.integers(min_value=0, max_value=6), min_size=3, max_size=3).filter(lambda w: sum(w) > 0)


def _normalised(raw: list[int]) -> Dist:
    total = sum(raw)
    return Dist.of((i, Fraction(w, total)) for i, w in enumerate(raw))


# ═══════════════════════════════════════════════════════════════════════════
# Monad laws
# ═══════════════════════════════════════════════════════════════════════════


class TestMonadLaws:
    """Left unit, right unit and associativity hold for each monad."""

    @pytest.mark.parametrize(
        "identifier",
        ["dist", "subdist", "cost", "pcost", "dist-cost", "state(2)", "term(f:1,a:0)"],
    )
    def test_laws_hold(self, identifier, budget):
        report = check_monad_laws(get_monad(identifier), budget.replace(max_cases=2000))
        assert report.passed, report.failed_laws()
        assert set(report.cases) == {"left_unit", "right_unit", "associativity"}

    def test_small_dist_check_is_exhaustive(self, budget):
        report = check_monad_laws(DIST, budget)
        assert all(report.exhaustive.values())

    @given(raw=weights)
    def test_dist_bind_preserves_mass(self, raw):
        c = _normalised(raw)
        f = TableMap.from_function(Carrier.atoms(3), lambda x: Dist.uniform([x, (x + 1) % 3]))
        assert DIST.bind(c, f).mass == 1

    @given(raw=weights)
    def test_dist_associativity(self, raw):
        c = _normalised(raw)

        def f(x):
            return Dist.of({x: Fraction(1, 3), 0: Fraction(2, 3)})

        def g(x):
            return Dist.uniform([x, 2])

        lhs = DIST.bind(DIST.bind(c, f), g)
        rhs = DIST.bind(c, lambda x: DIST.bind(f(x), g))
        assert lhs == rhs


# ═══════════════════════════════════════════════════════════════════════════
# Distributions
# ═══════════════════════════════════════════════════════════════════════════


class TestDist:
    """Tests for Dist construction and the (sub-)distribution monads."""

    def test_weights_merge_and_zeros_drop(self):
        d = Dist.of([(0, Fraction(1, 4)), (1, 0), (0, Fraction(1, 4)), (2, Fraction(1, 2))])
        assert d.support == (0, 2)
        assert d.prob(0) == Fraction(1, 2)
        assert d.prob(1) == 0

    def test_negative_weight_rejected(self):
        with pytest.raises(CarrierMismatch):
            Dist.of({0: Fraction(-1, 2)})

    def test_grid_distribution_count(self):
        """Weights in (1/2)ℕ on two points: three distributions, six sub-distributions."""
        carrier = Carrier.atoms(2)
        assert len(grid_distributions(carrier, 2)) == 3
        assert len(grid_distributions(carrier, 2, sub=True)) == 6

    def test_subdist_accepts_partial_mass(self, two_points):
        half = Dist.of({0: Fraction(1, 2)})
        assert SUBDIST.contains(half, two_points)
        assert not DIST.contains(half, two_points)

    def test_kleisli_validates_input(self, two_points):
        with pytest.raises(CarrierMismatch):
            kleisli(DIST, DIST.unit, Dist.dirac(5), two_points)

    def test_strength_pairs_the_context(self, nu_pair):
        nu1, _ = nu_pair
        paired = strength(DIST, "i", nu1)
        assert paired == Dist.of({("i", 0): Fraction(1, 2), ("i", 1): Fraction(1, 2)})

    def test_support_in_numeric_order(self):
        d = Dist.of({10: Fraction(1, 4), -1: Fraction(1, 4), 2: Fraction(1, 4), -4: Fraction(1, 4)})
        assert d.support == (-4, -1, 2, 10)

    def test_mixed_numbers_order_by_value(self):
        d = Dist.of({Fraction(3, 2): Fraction(1, 3), 1: Fraction(1, 3), 12: Fraction(1, 3)})
        assert d.support == (1, Fraction(3, 2), 12)

    def test_pairs_order_componentwise(self):
        d = Dist.of({(0, 10): Fraction(1, 2), (0, 9): Fraction(1, 2)})
        assert d.support == ((0, 9), (0, 10))


# ═══════════════════════════════════════════════════════════════════════════
# Cost monads
# ═══════════════════════════════════════════════════════════════════════════


class TestCostMonads:
    """Tests for cost accumulation in the cost, set-of-cost and dist-cost monads."""

    def test_cost_bind_adds(self):
        c = CostComp(Fraction(2), "x")
        result = COST.bind(c, lambda x: CostComp(Fraction(3), x + "!"))
        assert result == CostComp(Fraction(5), "x!")

    def test_pcost_bind_unions(self):
        c = CostSet.of([(0, "a"), (1, "b")])
        result = PCOST.bind(c, lambda x: CostSet.of([(1, x), (2, x)]))
        assert result.costs == [1, 2, 2, 3]

    def test_pcost_values_iterate_numerically(self):
        c = CostSet.of([(0, 10), (0, -2), (0, 9)])
        assert [e.value for e in c] == [-2, 9, 10]

    def test_dist_cost_charge_then_return(self):
        program = DIST_COST.bind(DIST_COST.charge(Fraction(1, 5)), lambda _: DIST_COST.unit("done"))
        assert program == Dist.dirac(CostComp(Fraction(1, 5), "done"))

    def test_dist_cost_marginal(self):
        c = Dist.of({CostComp(Fraction(0), 0): Fraction(1, 2), CostComp(Fraction(1), 1): Fraction(1, 2)})
        shifted = DIST_COST.bind(c, lambda x: DIST_COST.charge(x))
        assert cost_marginal(shifted) == Dist.of({Fraction(0): Fraction(1, 2), Fraction(2): Fraction(1, 2)})

    def test_natural_cost_rejects_fractions(self, two_points):
        assert not COST.contains(CostComp(Fraction(1, 2), 0), two_points)
        assert get_monad("cost-q").contains(CostComp(Fraction(1, 2), 0), two_points)


# ═══════════════════════════════════════════════════════════════════════════
# Registry, state and terms
# ═══════════════════════════════════════════════════════════════════════════


class TestMonadRegistry:
    """Tests for monad identifiers."""

    def test_fixed_identifiers(self):
        assert get_monad("dist") is DIST
        assert get_monad("pcost") is PCOST

    def test_named_states(self):
        monad = get_monad("state(lo,hi)")
        assert isinstance(monad, StateMonad)
        assert monad.states.elements == ("lo", "hi")

    def test_term_monad(self):
        monad = get_monad("term(f:1,a:0)")
        assert isinstance(monad, TermMonad)
        assert monad.signature.arity("f") == 1

    @pytest.mark.parametrize("identifier", ["giry", "state()", "term(f)"])
    def test_unknown_identifiers(self, identifier):
        with pytest.raises((ScenarioError, ParseError)):
            get_monad(identifier)


class TestStateMonad:
    """Tests for state transformers."""

    def test_bind_threads_state(self):
        states = Carrier.atoms(2)
        monad = StateMonad(states)
        flip = StateFn.from_function(states, lambda s: (s, 1 - s))
        twice = monad.bind(flip, lambda x: monad.bind(flip, lambda y: monad.unit((x, y))))
        assert twice(0) == ((0, 1), 0)
        assert twice(1) == ((1, 0), 1)


class TestTerms:
    """Tests for Ω-terms and the term monad."""

    @pytest.fixture
    def sig(self) -> OmegaSignature:
        """One unary operator and one constant."""
        return OmegaSignature.parse("f:1,g:2,a:0")

    def test_parse_and_format(self, sig):
        term = parse_term("g(f(x),a)", sig)
        assert term == Op("g", (Op("f", (Var("x"),)), Op("a")))
        assert format_term(term) == "g(f(x),a)"

    def test_arity_mismatch(self, sig):
        with pytest.raises(ParseError):
            parse_term("g(x)", sig)

    def test_substitute(self, sig):
        term = parse_term("g(x,y)", sig)
        assert format_term(substitute(term, {"x": parse_term("f(y)", sig)})) == "g(f(y),y)"

    def test_bind_is_substitution(self, sig):
        monad = TermMonad(sig)
        result = monad.bind(parse_term("f(x)", sig), lambda name: parse_term("g(z,z)", sig))
        assert format_term(result) == "f(g(z,z))"

    def test_enumeration_counts(self):
        sig = OmegaSignature.parse("f:1,a:0")
        terms = enumerate_terms(sig, ["x", "y"], 2)
        assert len(terms) == 8
        assert [format_term(t) for t in terms[:2]] == ["x", "y"]


# ═══════════════════════════════════════════════════════════════════════════
# Opfunctors
# ═══════════════════════════════════════════════════════════════════════════


class TestOpfunctors:
    """Tests for the opfunctor diagram checks and divergence transfer."""

    @pytest.fixture
    def halving(self):
        """Maps D to D_s by halving every mass: breaks the unit diagram."""
        return identity_opfunctor("halve", DIST, SUBDIST, lambda carrier, c: c.scale(Fraction(1, 2)))

    def test_inclusion_passes(self, budget):
        report = check_opfunctor_laws(dist_inclusion(), budget)
        assert report.passed

    def test_halving_refuted(self, budget, halving):
        report = check_opfunctor_laws(halving, budget)
        assert report.refuted
        assert report.witness["diagram"] == "unit"

    def test_transfer_along_inclusion(self, budget, nu_pair):
        transferred = opfunctor_transfer(dp_spec(), dist_inclusion(), budget)
        assert transferred.monad is DIST
        nu1, nu2 = nu_pair
        original = dp_spec().evaluate(Fraction(2), Carrier.atoms(2), nu1, nu2)
        assert transferred.evaluate(Fraction(2), Carrier.atoms(2), nu1, nu2) == original

    def test_transfer_rejects_broken_opfunctor(self, budget, halving):
        with pytest.raises(OpfunctorLawViolation):
            opfunctor_transfer(dp_spec(), halving, budget)
