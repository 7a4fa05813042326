"""
Divergences on the state monad S ⇒ (− × S), parameterised by a distance d_S on
states with d_S(s, s) = 0.

    lip   sup_{s₁,s₂} d(π₂ f₁ s₁, π₂ f₂ s₂) / d(s₁, s₂)    Top-relative, Rtimes, 0/0 = 1
    met   sup_s d(π₂ f₁ s, π₂ f₂ s) when π₁∘f₁ = π₁∘f₂ and
          both state parts are nonexpansive, else ∞          Eq-relative, Rplus (d a metric)
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Hashable
from dataclasses import dataclass, field
from fractions import Fraction

from divlog.core.carriers import Carrier
from divlog.core.domains import RPLUS, RTIMES, TRIVIAL_GRADING
from divlog.core.values import INF, ExtendedValue
from divlog.divergences.base import EQ, TOP, BasicEndorelation, DivergenceSpec
from divlog.errors import PreconditionFailed
from divlog.monads.state import StateFn, StateMonad

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StateMetric:
    """A distance on a finite state carrier."""

    name: str
    states: Carrier
    distance: Callable[[Hashable, Hashable], ExtendedValue] = field(repr=False)

    def __call__(self, s1: Hashable, s2: Hashable) -> ExtendedValue:
        return self.distance(s1, s2)

    def check(self, triangle: bool = False) -> None:
        """
        Raises:
            PreconditionFailed: if d(s, s) ≠ 0, or the triangle inequality fails when required.
        """
        for s in self.states:
            if self(s, s) != 0:
                raise PreconditionFailed(f"{self.name}: d({s!r}, {s!r}) = {self(s, s)} ≠ 0")
        if not triangle:
            return
        for a in self.states:
            for b in self.states:
                for c in self.states:
                    if self(a, c) > self(a, b) + self(b, c):
                        raise PreconditionFailed(f"{self.name}: triangle inequality fails at {a!r}, {b!r}, {c!r}")


def discrete_metric(states: Carrier) -> StateMetric:
    return StateMetric("discrete", states, lambda s1, s2: Fraction(0) if s1 == s2 else Fraction(1))


def absolute_metric(states: Carrier) -> StateMetric:
    """|s₁ − s₂| on numeric states."""
    return StateMetric("abs", states, lambda s1, s2: abs(Fraction(s1) - Fraction(s2)))


def _ratio(num: ExtendedValue, den: ExtendedValue) -> ExtendedValue:
    if den == 0:
        return Fraction(1) if num == 0 else INF
    return num / den


def lip_divergence(metric: StateMetric, f1: StateFn, f2: StateFn) -> ExtendedValue:
    """How much (π₂∘f₁, π₂∘f₂) stretches distances between initial states."""
    best: ExtendedValue = Fraction(0)
    for s1 in metric.states:
        for s2 in metric.states:
            best = max(best, _ratio(metric(f1.state_at(s1), f2.state_at(s2)), metric(s1, s2)))
    return best


def lipschitz_constant(metric: StateMetric, g: StateFn) -> ExtendedValue:
    """The Lipschitz constant of π₂∘g (with the 0/0 = 1 convention)."""
    return lip_divergence(metric, g, g)


def nonexpansive(metric: StateMetric, g: StateFn) -> bool:
    return all(
        metric(g.state_at(s1), g.state_at(s2)) <= metric(s1, s2)
        for s1 in metric.states for s2 in metric.states
    )


def met_divergence(metric: StateMetric, f1: StateFn, f2: StateFn) -> ExtendedValue:
    """Sup distance between the states reached from the same input."""
    if any(f1.value_at(s) != f2.value_at(s) for s in metric.states):
        return INF
    if not (nonexpansive(metric, f1) and nonexpansive(metric, f2)):
        return INF
    return max((metric(f1.state_at(s), f2.state_at(s)) for s in metric.states), default=Fraction(0))


def lip_spec(metric: StateMetric, endorelation: BasicEndorelation = TOP) -> DivergenceSpec:
    metric.check()
    return DivergenceSpec(
        name=f"lip({metric.name})",
        monad=StateMonad(metric.states),
        grading=TRIVIAL_GRADING,
        domain=RTIMES,
        endorelation=endorelation,
        evaluator=lambda m, carrier, c1, c2: lip_divergence(metric, c1, c2),
        description="Lipschitz constant of the state updates",
    )


def met_spec(metric: StateMetric, endorelation: BasicEndorelation = EQ) -> DivergenceSpec:
    metric.check(triangle=True)
    return DivergenceSpec(
        name=f"met({metric.name})",
        monad=StateMonad(metric.states),
        grading=TRIVIAL_GRADING,
        domain=RPLUS,
        endorelation=endorelation,
        evaluator=lambda m, carrier, c1, c2: met_divergence(metric, c1, c2),
        description="sup distance of updated states from a common input",
    )
