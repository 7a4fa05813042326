"""
Cost monads: the cost-count writer ℕ × −, its finite powerset P(ℕ × −), and the
probabilistic cost monad D(C × −) used by the cost-combined divergence.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Hashable, Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from divlog.core.carriers import Carrier
from divlog.core.search import SearchBudget, compositions
from divlog.core.values import ExtendedValue, format_value
from divlog.monads.base import Monad
from divlog.monads.dist import Dist, mixture, sort_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=False)
class CostComp:
    """A value tagged with the cost spent producing it."""

    cost: ExtendedValue
    value: Hashable

    def __repr__(self) -> str:
        return f"({format_value(self.cost)}, {self.value!r})"


def _is_cost(cost: Any, rational: bool) -> bool:
    if isinstance(cost, bool) or not isinstance(cost, (int, Fraction)):
        return False
    if rational:
        return True
    return cost >= 0 and Fraction(cost).denominator == 1


class CostMonad(Monad):
    """ℕ × −: f♯(i, x) = (i + π₁ f(x), π₂ f(x))."""

    def __init__(self, rational: bool = False):
        self.rational = rational
        self.name = "cost-q" if rational else "cost"

    def unit(self, x: Hashable) -> CostComp:
        return CostComp(Fraction(0), x)

    def bind(self, c: CostComp, f: Callable[[Hashable], CostComp]) -> CostComp:
        result = f(c.value)
        return CostComp(c.cost + result.cost, result.value)

    def contains(self, c: Any, carrier: Carrier) -> bool:
        return isinstance(c, CostComp) and _is_cost(c.cost, self.rational) and c.value in carrier

    def elements(self, carrier: Carrier, budget: SearchBudget) -> Sequence[CostComp]:
        return [CostComp(Fraction(i), x) for i in range(budget.cost_bound + 1) for x in carrier]

    def support(self, c: CostComp) -> tuple:
        return (c,)

    def outcome_value(self, outcome: CostComp) -> Hashable:
        return outcome.value

    def relabel(self, c: CostComp, mapping: Callable[[Any], Any]) -> CostComp:
        return CostComp(c.cost, mapping(c.value))

    def charge(self, cost: ExtendedValue) -> CostComp:
        return CostComp(Fraction(cost), ())


@dataclass(frozen=True)
class CostSet:
    """A finite set of cost-tagged values (nondeterministic cost)."""

    entries: frozenset[CostComp]

    @classmethod
    def of(cls, pairs: Iterable[tuple[Any, Hashable] | CostComp]) -> CostSet:
        entries = []
        for pair in pairs:
            if isinstance(pair, CostComp):
                entries.append(pair)
            else:
                cost, value = pair
                entries.append(CostComp(Fraction(cost), value))
        return cls(frozenset(entries))

    def __iter__(self) -> Iterator[CostComp]:
        return iter(sorted(self.entries, key=lambda e: (e.cost, sort_key(e.value))))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def costs(self) -> list[ExtendedValue]:
        return [e.cost for e in self]

    def __repr__(self) -> str:
        return "{" + ", ".join(repr(e) for e in self) + "}"


class CostSetMonad(Monad):
    """P(ℕ × −): η x = {(0, x)}, f♯ A = ∪ {(i + j, y) | (i, x) ∈ A, (j, y) ∈ f x}."""

    name = "pcost"

    def unit(self, x: Hashable) -> CostSet:
        return CostSet(frozenset({CostComp(Fraction(0), x)}))

    def bind(self, c: CostSet, f: Callable[[Hashable], CostSet]) -> CostSet:
        entries = set()
        for entry in c.entries:
            for result in f(entry.value).entries:
                entries.add(CostComp(entry.cost + result.cost, result.value))
        return CostSet(frozenset(entries))

    def contains(self, c: Any, carrier: Carrier) -> bool:
        return isinstance(c, CostSet) and all(
            _is_cost(e.cost, False) and e.value in carrier for e in c.entries
        )

    def elements(self, carrier: Carrier, budget: SearchBudget) -> Sequence[CostSet]:
        atoms = [CostComp(Fraction(i), x) for i in range(budget.cost_bound + 1) for x in carrier]
        result = []
        for size in range(budget.max_set_size + 1):
            for combo in itertools.combinations(atoms, size):
                result.append(CostSet(frozenset(combo)))
        return result

    def support(self, c: CostSet) -> tuple:
        return tuple(c)

    def outcome_value(self, outcome: CostComp) -> Hashable:
        return outcome.value

    def relabel(self, c: CostSet, mapping: Callable[[Any], Any]) -> CostSet:
        return CostSet(frozenset(CostComp(e.cost, mapping(e.value)) for e in c.entries))

    def charge(self, cost: ExtendedValue) -> CostSet:
        return CostSet(frozenset({CostComp(Fraction(cost), ())}))


class DistCostMonad(Monad):
    """
    D(C × −): distributions over cost-tagged values.

    Costs are rationals (the cost-writer monad over (ℚ, +)); ``tick(r)`` is
    η(r, ⋆) and sampling leaves the cost untouched.
    """

    name = "dist-cost"

    def unit(self, x: Hashable) -> Dist:
        return Dist.dirac(CostComp(Fraction(0), x))

    def bind(self, c: Dist, f: Callable[[Hashable], Dist]) -> Dist:
        def shifted(entry: CostComp) -> Dist:
            return Dist.of((CostComp(entry.cost + out.cost, out.value), q) for out, q in f(entry.value))

        return mixture((shifted(entry), p) for entry, p in c.items)

    def contains(self, c: Any, carrier: Carrier) -> bool:
        return (
            isinstance(c, Dist)
            and c.mass == 1
            and all(isinstance(e, CostComp) and e.value in carrier for e in c.support)
        )

    def elements(self, carrier: Carrier, budget: SearchBudget) -> Sequence[Dist]:
        atoms = [CostComp(Fraction(i), x) for i in range(budget.cost_bound + 1) for x in carrier]
        return [
            Dist.of((a, Fraction(k, budget.grid_denom)) for a, k in zip(atoms, combo, strict=True))
            for combo in compositions(budget.grid_denom, len(atoms))
        ]

    def support(self, c: Dist) -> tuple:
        return c.support

    def outcome_value(self, outcome: CostComp) -> Hashable:
        return outcome.value

    def relabel(self, c: Dist, mapping: Callable[[Any], Any]) -> Dist:
        return c.pushforward(lambda e: CostComp(e.cost, mapping(e.value)))

    def lift_distribution(self, dist: Dist) -> Dist:
        return dist.pushforward(lambda x: CostComp(Fraction(0), x))

    def charge(self, cost: ExtendedValue) -> Dist:
        return Dist.dirac(CostComp(Fraction(cost), ()))


def cost_marginal(c: Dist) -> Dist:
    """T π₁: the distribution of costs."""
    return c.pushforward(lambda e: e.cost)


def value_marginal(c: Dist) -> Dist:
    return c.pushforward(lambda e: e.value)


COST = CostMonad()
RATIONAL_COST = CostMonad(rational=True)
PCOST = CostSetMonad()
DIST_COST = DistCostMonad()
