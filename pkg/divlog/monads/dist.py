"""
Finite (sub-)probability distributions with exact rational weights.

The Dist type serves both the distribution monad and the sub-distribution
monad; the two instances differ only in their mass constraint and in the
grid they enumerate.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from divlog.core.carriers import Carrier
from divlog.core.search import SearchBudget, compositions
from divlog.core.values import ExtendedValue, approx_equal, format_value, is_exact
from divlog.errors import CarrierMismatch
from divlog.monads.base import Monad

logger = logging.getLogger(__name__)


def sort_key(element: Any) -> tuple[Any, ...]:
    """Total order on heterogeneous elements, stable across runs; numbers come first, by value."""
    if isinstance(element, (int, Fraction, float)) and not isinstance(element, bool):
        return (0, element, "")
    if isinstance(element, tuple):
        return (1, "tuple", tuple(sort_key(part) for part in element))
    return (1, type(element).__name__, repr(element))


@dataclass(frozen=True)
class Dist:
    """A finitely supported measure; ``items`` is canonical (sorted, no zero weights)."""

    items: tuple[tuple[Hashable, ExtendedValue], ...]

    @classmethod
    def of(cls, weights: Mapping[Hashable, Any] | Iterable[tuple[Hashable, Any]]) -> Dist:
        pairs = weights.items() if isinstance(weights, Mapping) else weights
        acc: dict[Hashable, ExtendedValue] = {}
        for element, weight in pairs:
            weight = Fraction(weight) if isinstance(weight, (int, str)) else weight
            if weight < 0:
                raise CarrierMismatch(f"negative weight {weight} on {element!r}")
            acc[element] = acc.get(element, Fraction(0)) + weight
        return cls(tuple(sorted(((x, p) for x, p in acc.items() if p != 0),
                                key=lambda item: sort_key(item[0]))))

    @classmethod
    def dirac(cls, element: Hashable) -> Dist:
        return cls(((element, Fraction(1)),))

    @classmethod
    def uniform(cls, elements: Iterable[Hashable]) -> Dist:
        elements = list(elements)
        return cls.of((x, Fraction(1, len(elements))) for x in elements)

    @classmethod
    def empty(cls) -> Dist:
        return cls(())

    def __iter__(self) -> Iterator[tuple[Hashable, ExtendedValue]]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    @property
    def mass(self) -> ExtendedValue:
        return sum((p for _, p in self.items), Fraction(0))

    def prob(self, element: Hashable) -> ExtendedValue:
        for x, p in self.items:
            if x == element:
                return p
        return Fraction(0)

    def measure(self, event: Iterable[Hashable]) -> ExtendedValue:
        event = set(event)
        return sum((p for x, p in self.items if x in event), Fraction(0))

    @property
    def support(self) -> tuple[Hashable, ...]:
        return tuple(x for x, _ in self.items)

    def pushforward(self, h: Callable[[Hashable], Hashable]) -> Dist:
        return Dist.of((h(x), p) for x, p in self.items)

    def scale(self, factor: ExtendedValue) -> Dist:
        return Dist.of((x, p * factor) for x, p in self.items)

    def vectors(self, other: Dist, carrier: Iterable[Hashable] = ()) -> tuple[list, np.ndarray, np.ndarray]:
        """Aligned float weight arrays over the union of supports (plus ``carrier``)."""
        keys = sorted(set(self.support) | set(other.support) | set(carrier), key=sort_key)
        left = np.array([float(self.prob(x)) for x in keys], dtype=float)
        right = np.array([float(other.prob(x)) for x in keys], dtype=float)
        return keys, left, right

    def __str__(self) -> str:
        body = " + ".join(f"{format_value(p)}·{x!r}" for x, p in self.items)
        return body or "0"


def union_support(*dists: Dist, carrier: Iterable[Hashable] = ()) -> list[Hashable]:
    keys: set[Hashable] = set(carrier)
    for dist in dists:
        keys.update(dist.support)
    return sorted(keys, key=sort_key)


def mixture(pairs: Iterable[tuple[Dist, ExtendedValue]]) -> Dist:
    acc: list[tuple[Hashable, ExtendedValue]] = []
    for dist, weight in pairs:
        acc.extend((x, weight * p) for x, p in dist.items)
    return Dist.of(acc)


class DistMonad(Monad):
    """The finite distribution monad D, or the sub-distribution monad when ``sub``."""

    def __init__(self, sub: bool = False):
        self.sub = sub
        self.name = "subdist" if sub else "dist"

    def unit(self, x: Hashable) -> Dist:
        return Dist.dirac(x)

    def bind(self, c: Dist, f: Callable[[Hashable], Dist]) -> Dist:
        return mixture((f(x), p) for x, p in c.items)

    def contains(self, c: Any, carrier: Carrier) -> bool:
        if not isinstance(c, Dist):
            return False
        if any(x not in carrier for x in c.support):
            return False
        mass = c.mass
        if self.sub:
            return mass <= 1 or approx_equal(mass, Fraction(1))
        if is_exact(mass):
            return mass == 1
        return approx_equal(mass, Fraction(1))

    def elements(self, carrier: Carrier, budget: SearchBudget) -> Sequence[Dist]:
        return grid_distributions(carrier, budget.grid_denom, sub=self.sub)

    def support(self, c: Dist) -> tuple:
        return c.support

    def relabel(self, c: Dist, mapping: Callable[[Any], Any]) -> Dist:
        return c.pushforward(mapping)

    def lift_distribution(self, dist: Dist) -> Dist:
        return dist

    def sample(self, carrier: Carrier, budget: SearchBudget, salt: str) -> Dist:
        """A seeded random grid distribution."""
        rng = budget.rng(f"{self.name}:sample:{salt}")
        parts = len(carrier) + (1 if self.sub else 0)
        cuts = np.sort(rng.integers(0, budget.grid_denom + 1, size=parts - 1))
        counts = np.diff(np.concatenate(([0], cuts, [budget.grid_denom])))
        return Dist.of((x, Fraction(int(k), budget.grid_denom)) for x, k in zip(carrier, counts, strict=False))


def grid_distributions(carrier: Carrier, denom: int, sub: bool = False) -> list[Dist]:
    """All (sub-)distributions on ``carrier`` with weights in (1/denom)ℕ."""
    parts = len(carrier) + (1 if sub else 0)
    result = []
    for combo in compositions(denom, parts):
        result.append(Dist.of((x, Fraction(k, denom)) for x, k in zip(carrier, combo, strict=False)))
    return result


DIST = DistMonad()
SUBDIST = DistMonad(sub=True)
