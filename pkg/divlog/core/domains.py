"""
Divergence domains and grading monoids.

A divergence domain is an ordered commutative monoid whose order is a complete
lattice; the shipped ones are:

    N          (ℕ ∪ {∞}, +, 0)
    Rplus      ([0, ∞], +, 0)
    Rtimes     ([0, ∞], ×, 1)            with 0 · ∞ = 0
    Rgamma(γ)  ([0, ∞], p + q + γpq, 0)
    Z          (ℤ ∪ {±∞}, +̄, 0)          r +̄ (−∞) = −∞ for every r
    R          ([−∞, ∞], +̄, 0)
    Bool       ({0 ≥ 1}, ×, 1)            1 is the least element ("related")

Grades are kept apart from values: a GradingMonoid carries its own unit,
multiplication and order. Privacy grades ε are stored multiplicatively as
α = e^ε so that ε = ln 2 stays an exact rational.
"""

from __future__ import annotations

import logging
import math
import re
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any

from divlog.core.values import (
    DEFAULT_TOLERANCE,
    INF,
    NEG_INF,
    ExtendedValue,
    format_value,
    is_exact,
    is_finite,
    leq,
    mul,
    parse_value,
)
from divlog.errors import DomainMismatch, GradeOutsideMonoid

logger = logging.getLogger(__name__)


# ── Carrier predicates ────────────────────────────────────────────────────


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, Fraction, float)) and not isinstance(value, bool)


def _nonneg(value: Any) -> bool:
    return _is_number(value) and not (isinstance(value, float) and math.isnan(value)) and value >= 0


def _integral(value: Any) -> bool:
    if not _is_number(value):
        return False
    if not is_finite(value):
        return True
    return Fraction(value).denominator == 1


def _extended_add(a: ExtendedValue, b: ExtendedValue) -> ExtendedValue:
    """+̄: −∞ absorbs everything, including +∞."""
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


# ── Divergence domains ────────────────────────────────────────────────────


@dataclass(frozen=True)
class DivergenceDomain:
    """An ordered commutative monoid on extended values."""

    name: str
    zero: ExtendedValue
    bottom: ExtendedValue
    top: ExtendedValue
    combine: Callable[[ExtendedValue, ExtendedValue], ExtendedValue] = field(repr=False)
    member: Callable[[ExtendedValue], bool] = field(repr=False)
    # Bool orders its carrier opposite to the numbers
    descending: bool = False

    def contains(self, value: ExtendedValue) -> bool:
        return self.member(value)

    def require(self, value: ExtendedValue) -> ExtendedValue:
        if not self.member(value):
            raise DomainMismatch(f"{format_value(value)} is not in the carrier of {self.name}")
        return value

    def add(self, a: ExtendedValue, b: ExtendedValue) -> ExtendedValue:
        return self.combine(self.require(a), self.require(b))

    def leq(self, a: ExtendedValue, b: ExtendedValue, tolerance: float = DEFAULT_TOLERANCE) -> bool:
        if self.descending:
            return leq(b, a, tolerance)
        return leq(a, b, tolerance)

    def join(self, a: ExtendedValue, b: ExtendedValue) -> ExtendedValue:
        if self.descending:
            return min(a, b)
        return max(a, b)

    def meet(self, a: ExtendedValue, b: ExtendedValue) -> ExtendedValue:
        if self.descending:
            return max(a, b)
        return min(a, b)

    def sup(self, values: Iterable[ExtendedValue]) -> ExtendedValue:
        result = self.bottom
        for value in values:
            result = self.join(result, self.require(value))
        return result

    def inf(self, values: Iterable[ExtendedValue]) -> ExtendedValue:
        result = self.top
        for value in values:
            result = self.meet(result, self.require(value))
        return result

    def samples(self, denom: int = 4, bound: int = 2) -> list[ExtendedValue]:
        """Grid of carrier values used by the law checks."""
        return _domain_samples(self.name, denom, bound)


def _rgamma(gamma: Fraction) -> DivergenceDomain:
    def combine(p: ExtendedValue, q: ExtendedValue) -> ExtendedValue:
        return p + q + mul(gamma, mul(p, q))

    return DivergenceDomain(
        name=f"Rgamma({format_value(gamma)})",
        zero=Fraction(0),
        bottom=Fraction(0),
        top=INF,
        combine=combine,
        member=_nonneg,
    )


N = DivergenceDomain(
    name="N",
    zero=Fraction(0),
    bottom=Fraction(0),
    top=INF,
    combine=lambda a, b: a + b,
    member=lambda v: _nonneg(v) and _integral(v),
)

RPLUS = DivergenceDomain(
    name="Rplus",
    zero=Fraction(0),
    bottom=Fraction(0),
    top=INF,
    combine=lambda a, b: a + b,
    member=_nonneg,
)

RTIMES = DivergenceDomain(
    name="Rtimes",
    zero=Fraction(1),
    bottom=Fraction(0),
    top=INF,
    combine=mul,
    member=_nonneg,
)

Z = DivergenceDomain(
    name="Z",
    zero=Fraction(0),
    bottom=NEG_INF,
    top=INF,
    combine=_extended_add,
    member=_integral,
)

R = DivergenceDomain(
    name="R",
    zero=Fraction(0),
    bottom=NEG_INF,
    top=INF,
    combine=_extended_add,
    member=lambda v: _is_number(v) and not (isinstance(v, float) and math.isnan(v)),
)

BOOL = DivergenceDomain(
    name="Bool",
    zero=Fraction(1),
    bottom=Fraction(1),
    top=Fraction(0),
    combine=lambda a, b: Fraction(a * b),
    member=lambda v: _is_number(v) and v in (0, 1),
    descending=True,
)

_FIXED_DOMAINS = {d.name: d for d in (N, RPLUS, RTIMES, Z, R, BOOL)}
_RGAMMA_PATTERN = re.compile(r"^Rgamma\((?P<gamma>[^)]+)\)$")


@lru_cache(maxsize=None)
def rgamma(gamma: Fraction | int = 1) -> DivergenceDomain:
    gamma = Fraction(gamma)
    if gamma < 0:
        raise DomainMismatch("Rgamma needs γ ≥ 0")
    if gamma == 0:
        return RPLUS
    return _rgamma(gamma)


def get_domain(identifier: str) -> DivergenceDomain:
    """Resolve "N", "Rplus", "Rtimes", "Rgamma(γ)", "Z", "R", "Bool"."""
    identifier = identifier.strip()
    if identifier in _FIXED_DOMAINS:
        return _FIXED_DOMAINS[identifier]
    match = _RGAMMA_PATTERN.match(identifier)
    if match:
        gamma = parse_value(match.group("gamma"))
        if not is_exact(gamma):
            raise DomainMismatch(f"Rgamma needs a rational γ, got {identifier!r}")
        return rgamma(gamma)
    raise DomainMismatch(f"unknown divergence domain {identifier!r}")


def domain_add(domain: DivergenceDomain, a: ExtendedValue, b: ExtendedValue) -> ExtendedValue:
    """Monoid sum of the domain; raises DomainMismatch outside the carrier."""
    return domain.add(a, b)


def domain_sup(domain: DivergenceDomain, values: Iterable[ExtendedValue]) -> ExtendedValue:
    """Least upper bound; the empty sup is the domain's bottom."""
    return domain.sup(values)


def _domain_samples(name: str, denom: int, bound: int) -> list[ExtendedValue]:
    if name == "Bool":
        return [Fraction(0), Fraction(1)]
    if name == "N":
        return [Fraction(k) for k in range(bound * 2 + 1)] + [INF]
    if name == "Z":
        return [NEG_INF] + [Fraction(k) for k in range(-bound, bound + 1)] + [INF]
    grid = [Fraction(k, denom) for k in range(bound * denom + 1)]
    if name == "R":
        negatives = [-v for v in reversed(grid) if v != 0]
        return [NEG_INF] + negatives + grid + [INF]
    return grid + [INF]


# ── Law checks ────────────────────────────────────────────────────────────


@dataclass
class DomainLawReport:
    """Outcome of the exhaustive monoid/order law check on a sample grid."""

    domain: str
    cases: int = 0
    violations: list[dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def check_domain_laws(domain: DivergenceDomain, denom: int = 4, bound: int = 2) -> DomainLawReport:
    """
    Check commutativity, associativity, the unit law, monotonicity of add and
    the partial-order laws on every triple of the sample grid (exact).
    """
    report = DomainLawReport(domain=domain.name)
    grid = domain.samples(denom, bound)

    def record(law: str, *values: ExtendedValue) -> None:
        report.violations.append({"law": law, "values": [format_value(v) for v in values]})

    for a in grid:
        if domain.add(domain.zero, a) != a:
            record("unit", a)
        if not domain.leq(a, a):
            record("reflexivity", a)
        for b in grid:
            report.cases += 1
            if domain.add(a, b) != domain.add(b, a):
                record("commutativity", a, b)
            if domain.leq(a, b) and domain.leq(b, a) and a != b:
                record("antisymmetry", a, b)
            for c in grid:
                if domain.add(domain.add(a, b), c) != domain.add(a, domain.add(b, c)):
                    record("associativity", a, b, c)
                if domain.leq(a, b) and not domain.leq(domain.add(a, c), domain.add(b, c)):
                    record("monotonicity", a, b, c)
                if domain.leq(a, b) and domain.leq(b, c) and not domain.leq(a, c):
                    record("transitivity", a, b, c)

    logger.info(
        "Domain laws: domain=%s cases=%d violations=%d",
        domain.name, report.cases, len(report.violations),
    )
    return report


# ── Grading monoids ───────────────────────────────────────────────────────


Grade = Any


@dataclass(frozen=True)
class GradingMonoid:
    """A partially ordered monoid of grades."""

    name: str
    unit: Grade
    combine: Callable[[Grade, Grade], Grade] = field(repr=False)
    order: Callable[[Grade, Grade], bool] = field(repr=False)
    member: Callable[[Grade], bool] = field(repr=False)
    parser: Callable[[str], Grade] = field(repr=False)
    formatter: Callable[[Grade], str] = field(repr=False)

    def mul(self, m: Grade, n: Grade) -> Grade:
        return self.combine(self.require(m), self.require(n))

    def leq(self, m: Grade, n: Grade) -> bool:
        return self.order(self.require(m), self.require(n))

    def contains(self, m: Grade) -> bool:
        return self.member(m)

    def require(self, m: Grade) -> Grade:
        if not self.member(m):
            raise GradeOutsideMonoid(f"{m!r} is not a grade of {self.name}")
        return m

    def parse(self, text: str | None) -> Grade:
        if text is None:
            return self.unit
        return self.require(self.parser(text))

    def format(self, m: Grade) -> str:
        return self.formatter(m)

    @property
    def trivial(self) -> bool:
        return self.unit is None


def _parse_trivial(text: str) -> None:
    if text.strip() not in ("", "_", "1", "none", "null"):
        raise GradeOutsideMonoid(f"the trivial grading has no grade {text!r}")
    return None


_LN_PATTERN = re.compile(r"^ln\((?P<arg>[^)]+)\)$")


def parse_privacy_grade(text: str) -> ExtendedValue:
    """
    Parse an ε-grade into its multiplicative form α = e^ε.

    "ln(2)" gives exactly 2, "0" gives 1, "inf" gives ∞ and any other decimal ε
    gives the float exp(ε). "alpha=3/2" passes α through directly.
    """
    text = text.strip()
    match = _LN_PATTERN.match(text)
    if match:
        return parse_value(match.group("arg"))
    if text.startswith("alpha="):
        return parse_value(text[len("alpha="):])
    epsilon = parse_value(text)
    if epsilon == 0:
        return Fraction(1)
    if not is_finite(epsilon):
        return INF if epsilon > 0 else Fraction(0)
    return math.exp(float(epsilon))


def format_privacy_grade(alpha: ExtendedValue) -> str:
    if alpha == 1:
        return "0"
    if not is_finite(alpha):
        return "inf"
    if is_exact(alpha):
        return f"ln({format_value(alpha)})"
    return repr(math.log(alpha))


TRIVIAL_GRADING = GradingMonoid(
    name="1",
    unit=None,
    combine=lambda m, n: None,
    order=lambda m, n: True,
    member=lambda m: m is None,
    parser=_parse_trivial,
    formatter=lambda m: "_",
)

PRIVACY_GRADING = GradingMonoid(
    name="Rplus(exp)",
    unit=Fraction(1),
    combine=mul,
    order=lambda m, n: leq(m, n),
    member=lambda m: _is_number(m) and m >= 1,
    parser=parse_privacy_grade,
    formatter=format_privacy_grade,
)

ADDITIVE_GRADING = GradingMonoid(
    name="Rplus",
    unit=Fraction(0),
    combine=lambda m, n: m + n,
    order=lambda m, n: leq(m, n),
    member=_nonneg,
    parser=parse_value,
    formatter=format_value,
)

GRADINGS = {g.name: g for g in (TRIVIAL_GRADING, PRIVACY_GRADING, ADDITIVE_GRADING)}


def check_grading_laws(grading: GradingMonoid, grades: Iterable[Grade]) -> list[dict[str, Any]]:
    """Unit law, associativity and monotonicity of mul on the given grades."""
    grades = list(grades)
    violations: list[dict[str, Any]] = []
    for m in grades:
        if grading.mul(grading.unit, m) != m or grading.mul(m, grading.unit) != m:
            violations.append({"law": "unit", "grades": [grading.format(m)]})
        for n in grades:
            for k in grades:
                if grading.mul(grading.mul(m, n), k) != grading.mul(m, grading.mul(n, k)):
                    violations.append({"law": "associativity",
                                       "grades": [grading.format(g) for g in (m, n, k)]})
                if grading.leq(m, n) and not grading.leq(grading.mul(m, k), grading.mul(n, k)):
                    violations.append({"law": "monotonicity",
                                       "grades": [grading.format(g) for g in (m, n, k)]})
    return violations
