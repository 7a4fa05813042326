"""
Combining a divergence on D with cost counting.

For an Eq-relative divergence Δ on D the family Δ[C] on D(C × −) compares the
cost marginals, provided the joint divergence is no larger than the marginal
one (the two computations differ only in their costs); otherwise it is ⊤.
"""

from __future__ import annotations

import logging
from typing import Any

from divlog.core.carriers import Carrier
from divlog.core.domains import Grade
from divlog.core.values import ExtendedValue
from divlog.divergences.base import EQ, DivergenceSpec
from divlog.errors import PreconditionFailed
from divlog.monads.cost import DIST_COST, cost_marginal

logger = logging.getLogger(__name__)


def cost_combined_divergence(base: DivergenceSpec, m: Grade, carrier: Carrier, c1: Any, c2: Any) -> ExtendedValue:
    marginal = base.evaluate(m, carrier, cost_marginal(c1), cost_marginal(c2))
    joint = base.evaluate(m, carrier, c1, c2)
    if base.domain.leq(joint, marginal):
        return marginal
    return base.domain.top


def cost_combined(base: DivergenceSpec) -> DivergenceSpec:
    """Δ[C] on D(C × −) for an Eq-relative Δ on (sub-)distributions."""
    if base.monad.name not in ("dist", "subdist"):
        raise PreconditionFailed(f"cost combination needs a divergence on dist, got {base.monad.name}")
    if base.endorelation != EQ:
        raise PreconditionFailed(f"{base.name} must be Eq-relative to combine with cost")
    return DivergenceSpec(
        name=f"{base.name}-cost",
        monad=DIST_COST,
        grading=base.grading,
        domain=base.domain,
        endorelation=EQ,
        evaluator=lambda m, carrier, c1, c2: cost_combined_divergence(base, m, carrier, c1, c2),
        exact=base.exact,
        grades=base.grades,
        description=f"{base.name} between cost distributions",
    )
