"""
Unit tests for the f-divergences.

Tests cover:
    - Closed forms (TV, KL, Hellinger, χ²) against the generic f-divergence
    - Boundary conventions when supports differ
    - The DP weight reproducing the DP divergence
    - The composability parameter table for each weight, and a broken one
"""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from divlog.core.values import INF
from divlog.divergences.privacy import dp_divergence, renyi_divergence
from divlog.divergences.statistical import (
    CHI2_WEIGHT,
    HD_WEIGHT,
    KL_WEIGHT,
    TV_WEIGHT,
    WEIGHTS,
    check_fdiv_parameters,
    chi_square,
    dp_weight,
    f_divergence,
    fdiv_spec,
    get_weight,
    hellinger_distance,
    kl_divergence,
    renyi_via_power,
    tv_distance,
)
from divlog.errors import ScenarioError
from divlog.monads.dist import DIST, SUBDIST, Dist

# ═══════════════════════════════════════════════════════════════════════════
# Closed forms
# ═══════════════════════════════════════════════════════════════════════════


class TestClosedForms:
    """The generic perspective sum agrees with each closed form."""

    def test_total_variation(self, nu_pair):
        assert tv_distance(*nu_pair) == Fraction(1, 6)
        assert f_divergence(TV_WEIGHT, *nu_pair) == Fraction(1, 6)

    def test_chi_square_exact(self, nu_pair):
        assert chi_square(*nu_pair) == Fraction(1, 8)
        assert f_divergence(CHI2_WEIGHT, *nu_pair) == Fraction(1, 8)

    def test_kl(self, nu_pair):
        expected = 0.5 * math.log(1.5) + 0.5 * math.log(0.75)
        assert kl_divergence(*nu_pair) == pytest.approx(expected)
        assert f_divergence(KL_WEIGHT, *nu_pair) == pytest.approx(expected)

    def test_hellinger(self, nu_pair):
        expected = ((math.sqrt(1 / 2) - math.sqrt(1 / 3)) ** 2 + (math.sqrt(1 / 2) - math.sqrt(2 / 3)) ** 2) / 2
        assert hellinger_distance(*nu_pair) == pytest.approx(expected)
        assert f_divergence(HD_WEIGHT, *nu_pair) == pytest.approx(expected)

    def test_renyi_through_power_weight(self, nu_pair):
        assert renyi_via_power(2, *nu_pair) == pytest.approx(renyi_divergence(2, *nu_pair))

    def test_dp_weight_reproduces_dp(self, nu_pair):
        assert f_divergence(dp_weight(Fraction(1)), *nu_pair) == dp_divergence(Fraction(1), *nu_pair)


class TestSupportBoundary:
    """q = 0 < p charges p times the weight's slope at infinity."""

    def test_disjoint_tv_is_one(self):
        assert f_divergence(TV_WEIGHT, Dist.dirac(0), Dist.dirac(1)) == 1

    def test_disjoint_kl_is_infinite(self):
        assert f_divergence(KL_WEIGHT, Dist.dirac(0), Dist.dirac(1)) == INF
        assert kl_divergence(Dist.dirac(0), Dist.dirac(1)) == INF

    def test_disjoint_chi_square_is_infinite(self):
        assert chi_square(Dist.dirac(0), Dist.dirac(1)) == INF

    def test_subdistribution_mass_gap(self):
        """TV between a sub-distribution and the empty measure is half the mass."""
        assert f_divergence(TV_WEIGHT, Dist.of({0: Fraction(1, 2)}), Dist.empty()) == Fraction(1, 4)


# ═══════════════════════════════════════════════════════════════════════════
# Specs and weights
# ═══════════════════════════════════════════════════════════════════════════


class TestFdivSpecs:
    """Tests for the catalogue entries built from weights."""

    def test_tv_lives_on_subdistributions(self):
        spec = fdiv_spec(TV_WEIGHT)
        assert spec.monad is SUBDIST
        assert spec.witness_kind == "tv"

    def test_chi2_domain_has_product_term(self):
        spec = fdiv_spec(CHI2_WEIGHT)
        assert spec.monad is DIST
        assert spec.domain.name == "Rgamma(1)"

    def test_unknown_weight(self):
        with pytest.raises(ScenarioError):
            get_weight("js")


class TestParameterTable:
    """Both parameter inequalities hold on the 11⁴ grid for the shipped weights."""

    @pytest.mark.parametrize("name", sorted(WEIGHTS))
    def test_shipped_parameters_pass(self, name):
        report = check_fdiv_parameters(WEIGHTS[name], Fraction(1, 10))
        assert report.passed, report.to_dict()
        assert report.extras["points"] == 11**4

    @pytest.mark.parametrize("name", sorted(WEIGHTS))
    def test_broken_parameters_refuted(self, name):
        broken = WEIGHTS[name].with_parameters(gamma=0, beta_prime=2)
        report = check_fdiv_parameters(broken, Fraction(1, 10))
        assert report.refuted
        assert report.witness["inequality"] in (1, 2)

    def test_tv_covers_subdistributions(self):
        assert check_fdiv_parameters(TV_WEIGHT).extras["subdist"] is True
        assert check_fdiv_parameters(KL_WEIGHT).extras["subdist"] is False

    def test_step_must_divide_one(self):
        with pytest.raises(ScenarioError):
            check_fdiv_parameters(TV_WEIGHT, Fraction(3, 10))
