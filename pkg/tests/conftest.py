"""
Shared test fixtures for the divlog test suite.
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from divlog.core.carriers import Carrier
from divlog.core.search import SearchBudget
from divlog.metalang.signature import Signature, default_signature
from divlog.monads.dist import Dist


@pytest.fixture
def budget() -> SearchBudget:
    """Small enumeration bounds so exhaustive checks stay fast."""
    return SearchBudget(max_carrier=2, grid_denom=2, cost_bound=2, depth=2, max_set_size=2,
                        max_cases=20_000, seed=0, tolerance=1e-9)


@pytest.fixture
def signature() -> Signature:
    """R = {0, …, 4} with arithmetic, the noise mechanisms and tick."""
    return default_signature()


@pytest.fixture
def two_points() -> Carrier:
    return Carrier.atoms(2)


@pytest.fixture
def nu_pair() -> tuple[Dist, Dist]:
    """½d₀ + ½d₁ and ⅓d₀ + ⅔d₁, at total variation 1/6."""
    return (
        Dist.of({0: Fraction(1, 2), 1: Fraction(1, 2)}),
        Dist.of({0: Fraction(1, 3), 1: Fraction(2, 3)}),
    )
