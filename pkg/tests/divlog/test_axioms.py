"""
Unit tests for the divergence catalogue, the axiom checkers and the
preorder/Bool-divergence correspondence.

Tests cover:
    - Catalogue lookup, parameters and monad overrides
    - Monotonicity, unit reflexivity and composability verdicts
    - Endorelations: Eq, Top and custom tables
    - Preorder round trips, preorder laws and Ω-derived preorders
"""

from __future__ import annotations

import dataclasses
from fractions import Fraction

import pytest

from divlog.core.carriers import Carrier
from divlog.divergences.axioms import (
    check_axioms,
    check_monotonicity,
    check_unit_reflexivity,
    overall_verdict,
)
from divlog.divergences.base import EQ, TOP, AxiomReport, custom_endorelation, parse_endorelation
from divlog.divergences.catalogue import NAMES, describe, get_divergence
from divlog.divergences.cost import nc_spec, nci_spec
from divlog.divergences.preorder import (
    MonadPreorder,
    check_preorder_laws,
    divergence_to_preorder,
    equality_preorder,
    inclusion_preorder,
    omega_preorder,
    preorder_roundtrip,
    preorder_to_divergence,
    random_preorder,
    total_preorder,
)
from divlog.divergences.privacy import dp_spec
from divlog.divergences.statistical import fdiv_spec, get_weight
from divlog.errors import NotAPreorder, PreconditionFailed, ScenarioError
from divlog.monads.cost import COST, PCOST
from divlog.monads.dist import DIST, Dist

# ═══════════════════════════════════════════════════════════════════════════
# Catalogue
# ═══════════════════════════════════════════════════════════════════════════


class TestCatalogue:
    """Tests for get_divergence and describe."""

    @pytest.mark.parametrize("name", NAMES)
    def test_every_listed_name_resolves(self, name):
        spec = get_divergence(name)
        assert spec.monad is not None
        assert spec.grading.contains(spec.grading.unit)

    def test_describe_lists_every_entry(self):
        rows = describe()
        assert len(rows) == len(NAMES)
        assert {"name", "monad", "grading", "domain", "endorelation", "exact"} <= set(rows[0])

    def test_parameters(self):
        assert get_divergence("renyi(3)").name == "renyi(3)"
        assert get_divergence("lip(discrete:a,b)").monad.states.elements == ("a", "b")

    def test_monad_override(self):
        spec = get_divergence("dp@dist")
        assert spec.monad is DIST
        assert spec.name == "dp@dist"

    @pytest.mark.parametrize("name", ["js", "renyi(1)", "lip(cosine:1,2)", "dp@giry", "DP("])
    def test_bad_names(self, name):
        with pytest.raises(ScenarioError):
            get_divergence(name)


# ═══════════════════════════════════════════════════════════════════════════
# Axiom checks
# ═══════════════════════════════════════════════════════════════════════════


class TestAxiomChecks:
    """Tests for the three divergence axioms."""

    def test_dp_satisfies_all_three(self, budget):
        reports = check_axioms(dp_spec(), EQ, budget)
        assert [r.axiom for r in reports] == ["monotonicity", "unit-reflexivity", "composability"]
        assert overall_verdict(reports) == "passed"
        assert all(r.extras["endorelation"] == "eq" for r in reports)

    def test_nc_top(self, budget):
        assert overall_verdict(check_axioms(nc_spec(), TOP, budget.replace(cost_bound=1))) == "passed"

    def test_nci_top(self, budget):
        assert overall_verdict(check_axioms(nci_spec(), TOP, budget.replace(cost_bound=1))) == "passed"

    def test_tv_over_top_breaks_reflexivity(self, budget):
        """TV(η x, η y) = 1 for x ≠ y, so TV is not Top-reflexive."""
        report = check_unit_reflexivity(fdiv_spec(get_weight("tv")), TOP, budget)
        assert report.refuted
        assert report.lhs == 1

    def test_monotonicity_violation(self, budget):
        """Swapping the grade order makes DP increase with the grade."""
        spec = dp_spec(monad=DIST, grades=(Fraction(2),))
        flipped = dataclasses.replace(spec, evaluator=lambda m, carrier, c1, c2: Fraction(m - 1))
        report = check_monotonicity(flipped, budget)
        assert report.refuted

    def test_custom_endorelation(self, budget):
        """A table for carrier 2 only; other carriers have no pairs to offer."""
        relation = custom_endorelation({"2": [(0, 1)]}, label="flip")
        assert relation.pairs(Carrier.atoms(2)) == [(0, 1)]
        assert not relation.has_table(Carrier.atoms(1))
        with pytest.raises(PreconditionFailed):
            relation.pairs(Carrier.atoms(3))

    def test_parse_endorelation(self):
        assert parse_endorelation("EQ") is EQ
        assert parse_endorelation("top") is TOP
        with pytest.raises(PreconditionFailed):
            parse_endorelation("sym")

    def test_overall_verdict_precedence(self):
        reports = [AxiomReport("a"), AxiomReport("b", verdict="inconclusive"), AxiomReport("c", verdict="refuted")]
        assert overall_verdict(reports) == "refuted"
        assert overall_verdict(reports[:2]) == "inconclusive"


# ═══════════════════════════════════════════════════════════════════════════
# Preorders
# ═══════════════════════════════════════════════════════════════════════════


class TestPreorders:
    """Monad preorders correspond to Bool-valued Eq-relative divergences."""

    @pytest.fixture
    def small(self, budget):
        return budget.replace(max_carrier=2, grid_denom=2, cost_bound=1)

    @pytest.mark.parametrize(
        "source",
        [equality_preorder(DIST), total_preorder(DIST), inclusion_preorder(),
         preorder_to_divergence(inclusion_preorder())],
        ids=["eq", "total", "inclusion", "divergence"],
    )
    def test_roundtrip(self, source, small):
        result = preorder_roundtrip(source, small)
        assert result.report.passed
        assert result.report.cases > 0

    def test_random_preorder_roundtrip(self, small):
        preorder = random_preorder(PCOST, Carrier.atoms(2), small, density=0.1)
        assert preorder_roundtrip(preorder, small).report.passed

    def test_random_preorder_only_on_its_carrier(self, small):
        preorder = random_preorder(DIST, Carrier.atoms(2), small)
        with pytest.raises(PreconditionFailed):
            preorder.holds(Carrier.atoms(1), Dist.dirac(0), Dist.dirac(0))

    def test_random_preorder_is_seeded(self, small):
        carrier = Carrier.atoms(2)
        elements = list(PCOST.elements(carrier, small))
        first = random_preorder(PCOST, carrier, small).table(carrier, elements)
        second = random_preorder(PCOST, carrier, small).table(carrier, elements)
        assert (first == second).all()

    def test_bool_divergence_as_preorder(self, small):
        spec = preorder_to_divergence(inclusion_preorder())
        preorder = divergence_to_preorder(spec, small)
        assert preorder.name == "inclusion"

    def test_non_bool_divergence_rejected(self, small):
        with pytest.raises(PreconditionFailed):
            divergence_to_preorder(fdiv_spec(get_weight("tv")), small)

    def test_non_transitive_relation_rejected(self, budget):
        """Costs within one of each other: reflexive but not transitive."""
        close = MonadPreorder("close", COST, lambda carrier, a, b: abs(a.cost - b.cost) <= 1)
        with pytest.raises(NotAPreorder):
            divergence_to_preorder(preorder_to_divergence(close), budget)

    def test_laws_of_shipped_preorders(self, small):
        assert check_preorder_laws(equality_preorder(DIST), small).passed
        assert check_preorder_laws(inclusion_preorder(), small).passed

    def test_mass_at_zero_is_not_substitutive(self, small):
        by_mass = MonadPreorder("mass0", DIST, lambda carrier, a, b: a.prob(0) <= b.prob(0))
        report = check_preorder_laws(by_mass, small)
        assert report.refuted
        assert report.witness["law"] == "substitutivity"

    def test_omega_preorder_over_one_point(self, small):
        """Every distribution on one point is the same, so Eq^1 relates everything."""
        derived = omega_preorder(equality_preorder(DIST), Carrier.atoms(1), small)
        assert derived.holds(Carrier.atoms(2), Dist.dirac(0), Dist.dirac(1))
