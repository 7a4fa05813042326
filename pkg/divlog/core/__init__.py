"""Values, divergence domains, grading monoids, carriers and bounded search."""

from divlog.core.carriers import UNIT, Carrier
from divlog.core.domains import (
    ADDITIVE_GRADING,
    BOOL,
    PRIVACY_GRADING,
    RPLUS,
    RTIMES,
    TRIVIAL_GRADING,
    DivergenceDomain,
    GradingMonoid,
    N,
    R,
    Z,
    domain_add,
    domain_sup,
    get_domain,
    rgamma,
)
from divlog.core.search import SearchBudget
from divlog.core.values import INF, NEG_INF, ExtendedValue, format_value, parse_value

__all__ = [
    "ADDITIVE_GRADING",
    "BOOL",
    "INF",
    "NEG_INF",
    "PRIVACY_GRADING",
    "RPLUS",
    "RTIMES",
    "TRIVIAL_GRADING",
    "UNIT",
    "Carrier",
    "DivergenceDomain",
    "ExtendedValue",
    "GradingMonoid",
    "N",
    "R",
    "SearchBudget",
    "Z",
    "domain_add",
    "domain_sup",
    "format_value",
    "get_domain",
    "parse_value",
    "rgamma",
]
