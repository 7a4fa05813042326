"""
Unit tests for relation objects and the graded codensity lifting.

Tests cover:
    - Relation objects: boolean algebra, products, exponentials
    - Adjacency relations and their monotonicity in grade and budget
    - Test arrow side conditions and least budgets
    - TV generatedness: one-point arrows miss 1/6, the two-point witness finds it
    - Exact DP witnesses on Dist and SubDist
    - Fundamental property, strength law and enrichment
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from divlog.core.carriers import Carrier
from divlog.divergences.base import EQ, TOP
from divlog.divergences.cost import c_spec, nc_spec
from divlog.divergences.privacy import dp_divergence, dp_spec
from divlog.divergences.statistical import TV_WEIGHT, fdiv_spec
from divlog.errors import CarrierMismatch, InvalidTestArrow, PreconditionFailed
from divlog.lifting import (
    AdjacencyRel,
    RelObject,
    TestArrow,
    check_adjacency_monotone,
    check_enrichment,
    check_fundamental_property,
    check_strength_law,
    codensity_refute,
    exact_witness,
    generate_test_arrows,
    omega_test_family,
    validate_test_arrow,
)
from divlog.lifting.codensity import witness_value
from divlog.monads.base import TableMap
from divlog.monads.dist import DIST, Dist

# ═══════════════════════════════════════════════════════════════════════════
# Relation objects
# ═══════════════════════════════════════════════════════════════════════════


class TestRelObject:
    """Tests for the relation operations used by the assertion semantics."""

    @pytest.fixture
    def carrier(self) -> Carrier:
        return Carrier.atoms(3)

    def test_equality_pairs(self, carrier):
        assert RelObject.equality(carrier).pairs() == [(0, 0), (1, 1), (2, 2)]

    def test_meet_join_complement(self, carrier):
        eq = RelObject.equality(carrier)
        below = RelObject(carrier, carrier, lambda a, b: a <= b)
        assert eq.meet(below).pairs() == eq.pairs()
        assert len(eq.join(below).pairs()) == 6
        assert (0, 0) not in eq.complement()
        assert eq.leq(below)
        assert not below.leq(eq)

    def test_implication(self, carrier):
        below = RelObject(carrier, carrier, lambda a, b: a <= b)
        eq = RelObject.equality(carrier)
        assert (2, 1) in below.implies(eq)
        assert (0, 1) not in below.implies(eq)

    def test_shape_mismatch(self, carrier):
        with pytest.raises(CarrierMismatch):
            RelObject.equality(carrier).meet(RelObject.equality(Carrier.atoms(2)))

    def test_product(self):
        eq = RelObject.equality(Carrier.atoms(2))
        top = RelObject.top(Carrier.atoms(2), Carrier.atoms(2))
        product = eq.product(top)
        assert len(product.pairs()) == 2 * 4
        assert ((0, 0), (0, 1)) in product
        assert ((0, 0), (1, 0)) not in product

    def test_exponential_is_monotone_maps(self):
        """Eq ⇒ Eq relates exactly the equal function pairs."""
        eq = RelObject.equality(Carrier.atoms(2))
        arrows = eq.exponential(eq)
        assert len(arrows.left) == 4
        assert ((0, 1), (0, 1)) in arrows
        assert ((0, 1), (1, 1)) not in arrows

    def test_from_pairs_validates_elements(self, carrier):
        with pytest.raises(CarrierMismatch):
            RelObject.from_pairs(carrier, carrier, [(0, 7)])

    def test_maps_into(self, carrier):
        eq = RelObject.equality(carrier)
        assert eq.maps_into(eq, lambda x: x, lambda x: x)
        assert not eq.maps_into(eq, lambda x: x, lambda x: (x + 1) % 3)


class TestAdjacency:
    """Δ̃(m, v) as a relation on T I."""

    def test_membership(self, nu_pair):
        spec = fdiv_spec(TV_WEIGHT)
        adjacency = AdjacencyRel(spec, None, Fraction(1, 6), Carrier.atoms(2))
        assert nu_pair in adjacency
        tighter = AdjacencyRel(spec, None, Fraction(1, 7), Carrier.atoms(2))
        assert nu_pair not in tighter

    def test_monotone_in_grade_and_budget(self, budget):
        report = check_adjacency_monotone(dp_spec(), Carrier.atoms(2),
                                          [Fraction(0), Fraction(1, 4), Fraction(1)], budget)
        assert report.passed


# ═══════════════════════════════════════════════════════════════════════════
# Test arrows
# ═══════════════════════════════════════════════════════════════════════════


class TestArrows:
    """Tests for test arrow budgets and the codensity refutation search."""

    @pytest.fixture
    def tv(self):
        return fdiv_spec(TV_WEIGHT)

    @pytest.fixture
    def relation(self) -> RelObject:
        return RelObject.equality(Carrier.atoms(2))

    def test_generated_arrows_carry_least_budget(self, tv, relation, budget):
        for arrow in generate_test_arrows(tv, relation, [Carrier.atoms(1)], budget):
            validate_test_arrow(tv, relation, arrow)

    def test_underbudgeted_arrow_rejected(self, tv, relation):
        point = Carrier.atoms(1)
        k1 = TableMap(relation.left, (Dist.dirac(0), Dist.dirac(0)))
        k2 = TableMap(relation.right, (Dist.empty(), Dist.empty()))
        arrow = TestArrow(point, None, Fraction(0), k1, k2)
        with pytest.raises(InvalidTestArrow):
            validate_test_arrow(tv, relation, arrow)

    def test_one_point_arrows_do_not_refute(self, tv, relation, nu_pair, budget):
        """Every arrow into 1 stays within 1/12 of its budget on this pair."""
        arrows = list(generate_test_arrows(tv, relation, [Carrier.atoms(1)], budget))
        verdict = codensity_refute(tv, None, Fraction(1, 12), relation, *nu_pair, arrows)
        assert not verdict.refuted
        assert verdict.cases == len(arrows)

    def test_two_point_witness_refutes(self, tv, relation, nu_pair):
        witness = exact_witness(tv, *nu_pair, carrier=Carrier.atoms(2))
        assert witness_value(tv, witness, None, *nu_pair) == Fraction(1, 6)
        verdict = codensity_refute(tv, None, Fraction(1, 12), relation, *nu_pair, [witness])
        assert verdict.refuted
        assert verdict.lhs == Fraction(1, 6)

    def test_generated_by_two_points(self, tv, relation, nu_pair, budget):
        """Arrows into Ω = 2 exclude the pair at any budget below 1/6."""
        family = omega_test_family(tv, None, relation, budget)
        assert codensity_refute(tv, None, Fraction(1, 12), relation, *nu_pair, family).refuted

    def test_omega_needed(self, relation, budget):
        with pytest.raises(PreconditionFailed):
            list(omega_test_family(c_spec(), None, relation, budget))

    def test_no_witness_construction(self, nu_pair):
        with pytest.raises(PreconditionFailed):
            exact_witness(nc_spec(), *nu_pair)


class TestDPWitness:
    """The optimal event S* sent to one point attains the DP divergence."""

    @pytest.fixture
    def pair(self) -> tuple[Dist, Dist]:
        return Dist.of({0: Fraction(3, 4), 1: Fraction(1, 4)}), Dist.of({0: Fraction(1, 4), 1: Fraction(3, 4)})

    @pytest.mark.parametrize("monad_kind", ["subdist", "dist"])
    def test_witness_attains_divergence(self, pair, monad_kind):
        spec = dp_spec() if monad_kind == "subdist" else dp_spec(monad=DIST)
        alpha = Fraction(2)
        witness = exact_witness(spec, *pair, grade=alpha)
        assert witness.w == 0
        assert len(witness.target) == (1 if monad_kind == "subdist" else 2)
        assert witness_value(spec, witness, alpha, *pair) == dp_divergence(alpha, *pair) == Fraction(1, 4)


# ═══════════════════════════════════════════════════════════════════════════
# Lifting properties
# ═══════════════════════════════════════════════════════════════════════════


class TestFundamentalProperty:
    """Both directions on small enumerations."""

    @pytest.mark.parametrize(
        "spec, endorelation",
        [(c_spec(), TOP), (nc_spec(), TOP), (fdiv_spec(TV_WEIGHT), EQ), (dp_spec(), EQ)],
        ids=["c-top", "nc-top", "tv-eq", "dp-eq"],
    )
    def test_holds(self, spec, endorelation, budget):
        report = check_fundamental_property(spec, endorelation, budget.replace(cost_bound=1))
        assert report.verdict == "passed", report.to_dict()

    def test_cost_over_eq_fails_direction_c(self, budget):
        report = check_fundamental_property(c_spec(), EQ, budget.replace(cost_bound=1))
        assert report.c.refuted
        assert report.c.detail == "known counterexample"
        assert report.to_dict()["verdict"] == "refuted"


class TestStrengthAndEnrichment:
    """Tests for the strength law and the enrichment of the Kleisli category."""

    def test_strength_dp(self, budget):
        assert check_strength_law(dp_spec(), EQ, budget).passed

    def test_strength_cost_top(self, budget):
        assert check_strength_law(c_spec(), TOP, budget.replace(cost_bound=1)).passed

    def test_enrichment_cost_top(self, budget):
        assert check_enrichment(c_spec(), TOP, budget.replace(cost_bound=1, max_cases=5000)).passed

    def test_enrichment_cost_eq_refuted(self, budget):
        report = check_enrichment(c_spec(), EQ, budget.replace(cost_bound=1))
        assert report.refuted
        assert report.witness["law"] == "composition"
