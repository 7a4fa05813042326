"""
Cost-difference divergences.

    C     on ℕ × −       |i − j|                                 Top-relative, N
    C′    on ℕ × −       |i − j| if x = y else ∞                 Eq-relative, N
    NC    on P(ℕ × −)    sup over (i,x) ∈ A, (j,y) ∈ B of |i − j| Top-relative, N
    NCI   on P(ℕ × −)    sup over (i,x) ∈ A, (j,y) ∈ B of i − j   Top-relative, Z

All four are exact. The empty sup is the domain bottom (0 in N, −∞ in Z).
"""

from __future__ import annotations

import logging
from fractions import Fraction

from divlog.core.carriers import Carrier
from divlog.core.domains import N, TRIVIAL_GRADING, Z
from divlog.core.values import INF, NEG_INF, ExtendedValue
from divlog.divergences.base import EQ, TOP, BasicEndorelation, CompositionCase, DivergenceSpec
from divlog.monads.base import TableMap
from divlog.monads.cost import COST, PCOST, CostComp, CostSet

logger = logging.getLogger(__name__)


# ── Deterministic costs ───────────────────────────────────────────────────


def cost_difference(c1: CostComp, c2: CostComp) -> ExtendedValue:
    """C((i, x), (j, y)) = |i − j|."""
    return abs(Fraction(c1.cost) - Fraction(c2.cost))


def sensitive_cost_difference(c1: CostComp, c2: CostComp) -> ExtendedValue:
    """C′: the cost difference when the return values agree, ∞ otherwise."""
    if c1.value != c2.value:
        return INF
    return cost_difference(c1, c2)


def cost_eq_counterexample() -> CompositionCase:
    """
    C is not Eq-composable: f(x) = (0, w), f(y) = (1, w), f(z) = (0, v) sends
    (0, x), (0, y) at distance 0 to (0, w), (1, w) at distance 1.
    """
    source = Carrier.of("xyz", ("x", "y", "z"))
    target = Carrier.of("wv", ("w", "v"))
    f = TableMap(
        source,
        (CostComp(Fraction(0), "w"), CostComp(Fraction(1), "w"), CostComp(Fraction(0), "v")),
        label="f",
    )
    return CompositionCase(
        None, None, source, target,
        CostComp(Fraction(0), "x"), CostComp(Fraction(0), "y"), f, f,
        label="cost-eq",
    )


def c_spec(endorelation: BasicEndorelation = TOP) -> DivergenceSpec:
    """C on the cost monad, over ℕ with the trivial grading."""
    return DivergenceSpec(
        name="c",
        monad=COST,
        grading=TRIVIAL_GRADING,
        domain=N,
        endorelation=endorelation,
        evaluator=lambda m, carrier, c1, c2: cost_difference(c1, c2),
        known_cases=(cost_eq_counterexample(),),
        description="absolute cost difference of deterministic computations",
    )


def c_prime_spec(endorelation: BasicEndorelation = EQ) -> DivergenceSpec:
    """C′ on the cost monad, relative to Eq unless told otherwise."""
    return DivergenceSpec(
        name="c-prime",
        monad=COST,
        grading=TRIVIAL_GRADING,
        domain=N,
        endorelation=endorelation,
        evaluator=lambda m, carrier, c1, c2: sensitive_cost_difference(c1, c2),
        known_cases=(cost_eq_counterexample(),),
        description="cost difference, ∞ when the return values differ",
    )


# ── Nondeterministic costs ────────────────────────────────────────────────


def nc_divergence(a: CostSet, b: CostSet) -> ExtendedValue:
    """NC(A, B) = sup |i − j| over all choices; 0 when either side is empty."""
    return max(
        (abs(e1.cost - e2.cost) for e1 in a.entries for e2 in b.entries),
        default=Fraction(0),
    )


def nci_divergence(a: CostSet, b: CostSet) -> ExtendedValue:
    """NCI(A, B) = sup (i − j); −∞ when either side is empty, else h_A − l_B."""
    interval_a, interval_b = cost_interval(a), cost_interval(b)
    if interval_a is None or interval_b is None:
        return NEG_INF
    return interval_a[1] - interval_b[0]


def cost_interval(a: CostSet) -> tuple[Fraction, Fraction] | None:
    """[l_A, h_A], or None for the empty computation."""
    costs = a.costs
    if not costs:
        return None
    return min(costs), max(costs)


def nci_lower_bound(a: CostSet, b: CostSet) -> ExtendedValue:
    """−NCI(B, A) = l_A − h_B, the lower bound on i − j."""
    value = nci_divergence(b, a)
    return INF if value == NEG_INF else -value


def nc_spec(endorelation: BasicEndorelation = TOP) -> DivergenceSpec:
    """NC on P(ℕ × −), valued in ℕ."""
    return DivergenceSpec(
        name="nc",
        monad=PCOST,
        grading=TRIVIAL_GRADING,
        domain=N,
        endorelation=endorelation,
        evaluator=lambda m, carrier, c1, c2: nc_divergence(c1, c2),
        description="largest cost distance between nondeterministic runs",
    )


def nci_spec(endorelation: BasicEndorelation = TOP) -> DivergenceSpec:
    """NCI on P(ℕ × −), valued in the integers with ±∞."""
    return DivergenceSpec(
        name="nci",
        monad=PCOST,
        grading=TRIVIAL_GRADING,
        domain=Z,
        endorelation=endorelation,
        evaluator=lambda m, carrier, c1, c2: nci_divergence(c1, c2),
        description="upper bound on the cost subtraction i − j",
    )
