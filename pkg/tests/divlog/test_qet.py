"""
Unit tests for term metrics and the generated divergence on the term monad.

Tests cover:
    - The shipped metrics on small terms
    - CS-EPMet checks: two metrics pass, the depth-weighted one is refuted
    - Gen at a carrier and the Gen/(−)_X round trip
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from divlog.divergences.privacy import dp_spec
from divlog.errors import CarrierMismatch, PreconditionFailed
from divlog.monads.terms import OmegaSignature, parse_term
from divlog.qet import (
    agreement_ultrametric,
    check_csepmet,
    depth_weighted,
    discrete_metric,
    gen,
    gen_divergence,
    get_metric,
    pulled_back,
    round_trip,
)

NAMES = ("x", "y")


@pytest.fixture
def omega() -> OmegaSignature:
    return OmegaSignature.parse("f:1,a:0")


# ═══════════════════════════════════════════════════════════════════════════
# Metrics
# ═══════════════════════════════════════════════════════════════════════════


class TestMetrics:
    """Tests for the distances themselves."""

    def test_agreement_halves_per_level(self, omega):
        d = agreement_ultrametric(omega, NAMES)
        assert d(parse_term("f(x)", omega), parse_term("f(y)", omega)) == Fraction(1, 2)
        assert d(parse_term("f(f(x))", omega), parse_term("f(f(y))", omega)) == Fraction(1, 4)
        assert d(parse_term("f(x)", omega), parse_term("a", omega)) == 1

    def test_discrete(self, omega):
        d = discrete_metric(omega, NAMES)
        assert d(parse_term("f(x)", omega), parse_term("f(x)", omega)) == 0
        assert d(parse_term("f(x)", omega), parse_term("f(y)", omega)) == 1

    def test_depth_weighted(self, omega):
        d = depth_weighted(omega, NAMES)
        assert d(parse_term("x", omega), parse_term("f(a)", omega)) == 3

    def test_lookup(self, omega):
        assert get_metric("agreement", omega, NAMES).name == "agreement"
        with pytest.raises(PreconditionFailed):
            get_metric("hamming", omega, NAMES)


class TestCSEPMet:
    """Pseudometric laws plus substitutivity and congruence on depth ≤ 2 terms."""

    @pytest.mark.parametrize("factory", [agreement_ultrametric, discrete_metric], ids=["agreement", "discrete"])
    def test_shipped_metrics_pass(self, factory, omega, budget):
        report = check_csepmet(factory(omega, NAMES), budget)
        assert report.passed
        assert report.exhaustive

    def test_depth_weighted_not_substitutive(self, omega, budget):
        """x ↦ f(x) pushes d(x, y) = 1 up to d(f(x), y) = 2."""
        report = check_csepmet(depth_weighted(omega, NAMES), budget)
        assert report.refuted
        assert report.extras["clause"] == "substitutivity"
        assert report.lhs > report.rhs


# ═══════════════════════════════════════════════════════════════════════════
# Gen
# ═══════════════════════════════════════════════════════════════════════════


class TestGen:
    """Tests for Gen and the round trip through (−)_X."""

    def test_identity_map_attains_the_sup(self, omega, budget):
        d = agreement_ultrametric(omega, NAMES)
        t1, t2 = parse_term("f(x)", omega), parse_term("f(y)", omega)
        assert gen(d, d.carrier, t1, t2, budget) == Fraction(1, 2)

    def test_terms_must_live_over_the_carrier(self, omega, budget):
        d = agreement_ultrametric(omega, NAMES)
        with pytest.raises(CarrierMismatch):
            gen(d, d.carrier, parse_term("z", omega), parse_term("x", omega), budget)

    def test_round_trip(self, omega, budget):
        d = agreement_ultrametric(omega, NAMES)
        report = round_trip(gen_divergence(d, budget), NAMES, budget)
        assert report.passed
        assert report.cases > 0

    def test_pulled_back_needs_term_monad(self):
        with pytest.raises(PreconditionFailed):
            pulled_back(dp_spec(), NAMES)
