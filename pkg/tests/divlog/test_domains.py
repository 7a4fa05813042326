"""
Unit tests for divergence domains, extended values and grading monoids.

Tests cover:
    - Extended value parsing and formatting
    - Monoid and order laws of every domain (exhaustive grid and hypothesis)
    - Absorbing −∞ in Z and R, the reversed order of Bool
    - Domain lookup by identifier, including Rgamma(γ)
    - Privacy grades in multiplicative form and the grading laws
"""

from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from divlog.core.domains import (
    ADDITIVE_GRADING,
    BOOL,
    N,
    PRIVACY_GRADING,
    RPLUS,
    RTIMES,
    TRIVIAL_GRADING,
    R,
    Z,
    check_domain_laws,
    check_grading_laws,
    get_domain,
    parse_privacy_grade,
    rgamma,
)
from divlog.core.values import INF, NEG_INF, format_value, leq, mul, parse_value, sub
from divlog.errors import DomainMismatch, GradeOutsideMonoid

nonneg = st.fractions(min_value=0, max_value=8, max_denominator=6)


# ═══════════════════════════════════════════════════════════════════════════
# Extended values
# ═══════════════════════════════════════════════════════════════════════════


class TestExtendedValues:
    """Tests for parsing, formatting and the ∞ conventions."""

    @pytest.mark.parametrize(
        "text, expected",
        [("1/10", Fraction(1, 10)), ("0.25", Fraction(1, 4)), ("3", Fraction(3)),
         ("inf", INF), ("-inf", NEG_INF), ("∞", INF)],
    )
    def test_parse(self, text, expected):
        """Decimals parse exactly; the infinities have several spellings."""
        assert parse_value(text) == expected

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_value("one half")

    def test_format_is_stable(self):
        assert format_value(Fraction(82, 100)) == "41/50"
        assert format_value(Fraction(4)) == "4"
        assert format_value(INF) == "inf"

    def test_zero_times_infinity_is_zero(self):
        assert mul(0, INF) == 0
        assert mul(INF, Fraction(0)) == 0

    def test_infinity_minus_infinity_is_negative_infinity(self):
        assert sub(INF, INF) == NEG_INF

    def test_leq_uses_tolerance_only_for_floats(self):
        """Rationals compare exactly; floats get the tolerance."""
        assert not leq(Fraction(1, 10) + Fraction(1, 10**12), Fraction(1, 10))
        assert leq(0.1 + 1e-12, Fraction(1, 10))


# ═══════════════════════════════════════════════════════════════════════════
# Divergence domains
# ═══════════════════════════════════════════════════════════════════════════


class TestDomainLaws:
    """The exhaustive law check passes on each built-in domain."""

    @pytest.mark.parametrize("domain", [N, RPLUS, RTIMES, Z, R, BOOL, rgamma(1)], ids=lambda d: d.name)
    def test_laws_hold_on_grid(self, domain):
        report = check_domain_laws(domain, denom=2, bound=1)
        assert report.passed, report.violations
        assert report.cases > 0

    @given(a=nonneg, b=nonneg, c=nonneg)
    def test_rgamma_associative(self, a, b, c):
        domain = rgamma(Fraction(1, 2))
        assert domain.add(domain.add(a, b), c) == domain.add(a, domain.add(b, c))

    @given(a=nonneg, b=nonneg, c=nonneg)
    def test_rplus_addition_monotone(self, a, b, c):
        if RPLUS.leq(a, b):
            assert RPLUS.leq(RPLUS.add(a, c), RPLUS.add(b, c))

    @given(a=nonneg)
    def test_rtimes_unit(self, a):
        assert RTIMES.add(RTIMES.zero, a) == a


class TestDomainEdgeCases:
    """Tests for absorbing elements, order direction and membership."""

    def test_negative_infinity_absorbs_in_z_and_r(self):
        assert Z.add(NEG_INF, INF) == NEG_INF
        assert R.add(INF, NEG_INF) == NEG_INF
        assert R.add(Fraction(-3), Fraction(5)) == 2

    def test_bool_order_is_reversed(self):
        """1 is the least element of Bool and 0 the greatest."""
        assert BOOL.leq(1, 0)
        assert not BOOL.leq(0, 1)
        assert BOOL.sup([]) == 1
        assert BOOL.sup([Fraction(1), Fraction(0)]) == 0
        assert BOOL.add(Fraction(1), Fraction(0)) == 0

    def test_empty_sup_is_bottom(self):
        assert RPLUS.sup([]) == 0
        assert Z.sup([]) == NEG_INF

    def test_sup_of_values(self):
        assert RPLUS.sup([Fraction(1, 3), Fraction(1, 2), Fraction(0)]) == Fraction(1, 2)

    @pytest.mark.parametrize(
        "domain, value",
        [(N, Fraction(1, 2)), (RPLUS, Fraction(-1)), (BOOL, Fraction(2)), (Z, Fraction(1, 3))],
        ids=["N-half", "Rplus-negative", "Bool-two", "Z-third"],
    )
    def test_values_outside_carrier_rejected(self, domain, value):
        with pytest.raises(DomainMismatch):
            domain.add(value, domain.zero)

    def test_rgamma_combines_with_product_term(self):
        """p ⊕ q = p + q + γ·p·q."""
        assert rgamma(2).add(Fraction(1), Fraction(1, 2)) == Fraction(5, 2)

    def test_rgamma_zero_is_rplus(self):
        assert rgamma(0) is RPLUS


class TestDomainLookup:
    """Tests for get_domain identifiers."""

    @pytest.mark.parametrize("name", ["N", "Rplus", "Rtimes", "Z", "R", "Bool"])
    def test_fixed_names(self, name):
        assert get_domain(name).name == name

    def test_rgamma_identifier(self):
        domain = get_domain("Rgamma(1/2)")
        assert domain.add(Fraction(2), Fraction(2)) == 6

    def test_unknown_identifier(self):
        with pytest.raises(DomainMismatch):
            get_domain("Q")

    def test_negative_gamma_rejected(self):
        with pytest.raises(DomainMismatch):
            rgamma(-1)


# ═══════════════════════════════════════════════════════════════════════════
# Grading monoids
# ═══════════════════════════════════════════════════════════════════════════


class TestGradings:
    """Tests for grade parsing and the grading monoid laws."""

    def test_privacy_grade_multiplicative_form(self):
        """ε-grades are stored as α = e^ε; ln(·) keeps them exact."""
        assert parse_privacy_grade("ln(2)") == 2
        assert parse_privacy_grade("0") == 1
        assert parse_privacy_grade("inf") == INF
        assert parse_privacy_grade("alpha=3/2") == Fraction(3, 2)
        assert math.isclose(parse_privacy_grade("0.5"), math.exp(0.5))

    def test_missing_grade_is_unit(self):
        assert PRIVACY_GRADING.parse(None) == 1
        assert ADDITIVE_GRADING.parse(None) == 0
        assert TRIVIAL_GRADING.parse(None) is None

    def test_privacy_composition_adds_epsilons(self):
        assert PRIVACY_GRADING.mul(Fraction(2), Fraction(3)) == 6
        assert PRIVACY_GRADING.format(Fraction(6)) == "ln(6)"

    def test_grade_below_unit_rejected(self):
        with pytest.raises(GradeOutsideMonoid):
            PRIVACY_GRADING.require(Fraction(1, 2))

    def test_trivial_grading_rejects_real_grades(self):
        with pytest.raises(GradeOutsideMonoid):
            TRIVIAL_GRADING.parse("ln(2)")

    @pytest.mark.parametrize(
        "grading, grades",
        [(PRIVACY_GRADING, [Fraction(1), Fraction(3, 2), Fraction(2), INF]),
         (ADDITIVE_GRADING, [Fraction(0), Fraction(1, 4), Fraction(1), INF]),
         (TRIVIAL_GRADING, [None])],
        ids=["privacy", "additive", "trivial"],
    )
    def test_grading_laws(self, grading, grades):
        assert check_grading_laws(grading, grades) == []
