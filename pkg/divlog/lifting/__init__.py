"""
Graded codensity liftings: relation objects, test arrows and lifting properties.
"""

from divlog.lifting.codensity import (
    LiftingVerdict,
    TestArrow,
    codensity_refute,
    exact_witness,
    generate_test_arrows,
    omega_test_family,
    validate_test_arrow,
)
from divlog.lifting.properties import (
    FundamentalReport,
    check_enrichment,
    check_fundamental_property,
    check_strength_law,
)
from divlog.lifting.relations import AdjacencyRel, RelObject, check_adjacency_monotone

__all__ = [
    "AdjacencyRel",
    "FundamentalReport",
    "LiftingVerdict",
    "RelObject",
    "TestArrow",
    "check_adjacency_monotone",
    "check_enrichment",
    "check_fundamental_property",
    "check_strength_law",
    "codensity_refute",
    "exact_witness",
    "generate_test_arrows",
    "omega_test_family",
    "validate_test_arrow",
]
