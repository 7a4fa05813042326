"""
Binary relations between carriers and the adjacency relations of a divergence.

A RelObject is a triple (I₁, I₂, R) with R ⊆ I₁ × I₂. Relations of the same
shape form a boolean algebra; relations of any shape have products and
exponentials. An AdjacencyRel is the relation {(c₁, c₂) | Δ^m_I(c₁, c₂) ≤ v}
on T I, whose elements are enumerated under a SearchBudget.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Hashable, Iterable, Iterator
from dataclasses import dataclass, field
from typing import Any

from divlog.core.carriers import Carrier
from divlog.core.domains import Grade
from divlog.core.search import SearchBudget, bounded_product
from divlog.core.values import ExtendedValue
from divlog.divergences.base import AxiomReport, BasicEndorelation, DivergenceSpec
from divlog.errors import CarrierMismatch, NonEnumerable

logger = logging.getLogger(__name__)

Membership = Callable[[Hashable, Hashable], bool]


# ── Relations over carriers ───────────────────────────────────────────────


@dataclass(frozen=True)
class RelObject:
    """
    A relation between ``left`` and ``right``.

    ``member`` decides (x₁, x₂) ∈ R. ``enumerator``, when present, lists exactly
    the related pairs; otherwise pairs are found by filtering the product.
    """

    left: Carrier
    right: Carrier
    member: Membership = field(repr=False)
    enumerator: Callable[[], Iterable[tuple[Hashable, Hashable]]] | None = field(default=None, repr=False)
    name: str = "R"

    def __contains__(self, pair: object) -> bool:
        x1, x2 = pair  # type: ignore[misc]
        return bool(self.member(x1, x2))

    def pairs(self) -> list[tuple[Hashable, Hashable]]:
        if self.enumerator is not None:
            return list(self.enumerator())
        return [(a, b) for a in self.left for b in self.right if self.member(a, b)]

    @property
    def is_endo(self) -> bool:
        return self.left == self.right

    def _same_shape(self, other: RelObject) -> None:
        if (self.left, self.right) != (other.left, other.right):
            raise CarrierMismatch(
                f"{self.name} is over ({self.left.name}, {self.right.name}), "
                f"{other.name} over ({other.left.name}, {other.right.name})"
            )

    # boolean algebra on relations of one shape

    def meet(self, other: RelObject) -> RelObject:
        self._same_shape(other)
        return RelObject(self.left, self.right, lambda a, b: self.member(a, b) and other.member(a, b),
                         name=f"({self.name} ∧ {other.name})")

    def join(self, other: RelObject) -> RelObject:
        self._same_shape(other)
        return RelObject(self.left, self.right, lambda a, b: self.member(a, b) or other.member(a, b),
                         name=f"({self.name} ∨ {other.name})")

    def complement(self) -> RelObject:
        return RelObject(self.left, self.right, lambda a, b: not self.member(a, b), name=f"¬{self.name}")

    def implies(self, other: RelObject) -> RelObject:
        self._same_shape(other)
        return RelObject(self.left, self.right, lambda a, b: not self.member(a, b) or other.member(a, b),
                         name=f"({self.name} ⇒ {other.name})")

    def leq(self, other: RelObject) -> bool:
        self._same_shape(other)
        return all(other.member(a, b) for a, b in self.pairs())

    # cartesian structure

    def product(self, other: RelObject) -> RelObject:
        """X ×̇ Y over (X₁ × Y₁, X₂ × Y₂)."""

        def member(p: Any, q: Any) -> bool:
            return self.member(p[0], q[0]) and other.member(p[1], q[1])

        def enumerate_pairs() -> Iterator[tuple[Hashable, Hashable]]:
            for x1, x2 in self.pairs():
                for y1, y2 in other.pairs():
                    yield (x1, y1), (x2, y2)

        return RelObject(self.left.product(other.left), self.right.product(other.right),
                         member, enumerate_pairs, name=f"({self.name} × {other.name})")

    def maps_into(self, target: RelObject, f1: Callable, f2: Callable) -> bool:
        """(f₁, f₂) : self →̇ target."""
        return all(target.member(f1(a), f2(b)) for a, b in self.pairs())

    def exponential(self, other: RelObject) -> RelObject:
        """
        X ⇒̇ Y: pairs of functions (as tuples of images over X₁ and X₂) sending
        X-related arguments to Y-related results.
        """
        left = Carrier.of(f"{self.left.name}->{other.left.name}",
                          _function_tables(self.left, other.left))
        right = Carrier.of(f"{self.right.name}->{other.right.name}",
                           _function_tables(self.right, other.right))

        def member(g1: tuple, g2: tuple) -> bool:
            lookup1 = dict(zip(self.left.elements, g1, strict=True))
            lookup2 = dict(zip(self.right.elements, g2, strict=True))
            return all(other.member(lookup1[a], lookup2[b]) for a, b in self.pairs())

        return RelObject(left, right, member, name=f"({self.name} ⇒ {other.name})")

    # constructors

    @classmethod
    def top(cls, left: Carrier, right: Carrier) -> RelObject:
        return cls(left, right, lambda a, b: True, name="⊤")

    @classmethod
    def bottom(cls, left: Carrier, right: Carrier) -> RelObject:
        return cls(left, right, lambda a, b: False, lambda: (), name="⊥")

    @classmethod
    def unit(cls) -> RelObject:
        one = Carrier.of("1", ((),))
        return cls(one, one, lambda a, b: True, lambda: [((), ())], name="1̇")

    @classmethod
    def equality(cls, carrier: Carrier) -> RelObject:
        return cls(carrier, carrier, lambda a, b: a == b, lambda: [(x, x) for x in carrier],
                   name=f"Eq {carrier.name}")

    @classmethod
    def from_pairs(cls, left: Carrier, right: Carrier, pairs: Iterable[tuple[Hashable, Hashable]],
                   name: str = "R") -> RelObject:
        table = frozenset((left.require(a), right.require(b)) for a, b in pairs)
        ordered = sorted(table, key=lambda p: (left.index(p[0]), right.index(p[1])))
        return cls(left, right, lambda a, b: (a, b) in table, lambda: ordered, name=name)

    @classmethod
    def from_endorelation(cls, endorelation: BasicEndorelation, carrier: Carrier) -> RelObject:
        """E I as a relation object."""
        pairs = endorelation.pairs(carrier)
        return cls(carrier, carrier, lambda a, b: endorelation.holds(carrier, a, b), lambda: pairs,
                   name=f"{endorelation.name} {carrier.name}")


def _function_tables(source: Carrier, target: Carrier) -> list[tuple]:
    return list(itertools.product(target.elements, repeat=len(source)))


# ── Adjacency relations ───────────────────────────────────────────────────


@dataclass(frozen=True)
class AdjacencyRel:
    """Δ̃(m, v) I = {(c₁, c₂) ∈ T I × T I | Δ^m_I(c₁, c₂) ≤ v}."""

    spec: DivergenceSpec
    m: Grade
    v: ExtendedValue
    carrier: Carrier
    tolerance: float = 0.0

    def __contains__(self, pair: object) -> bool:
        c1, c2 = pair  # type: ignore[misc]
        return self.holds(c1, c2)

    def holds(self, c1: Any, c2: Any) -> bool:
        value = self.spec.evaluate(self.m, self.carrier, c1, c2)
        return self.spec.domain.leq(value, self.v, self.tolerance)

    def pairs(self, budget: SearchBudget) -> Iterator[tuple[Any, Any]]:
        """Related pairs among the enumerated elements of T I."""
        elements = self.spec.monad.elements(self.carrier, budget)
        for c1 in elements:
            for c2 in elements:
                if self.holds(c1, c2):
                    yield c1, c2

    def as_relation(self, budget: SearchBudget) -> RelObject:
        """A RelObject over the enumerated T I (elements as a carrier)."""
        elements = self.spec.monad.elements(self.carrier, budget)
        try:
            carrier = Carrier.of(f"{self.spec.monad.name}({self.carrier.name})", elements)
        except TypeError as exc:
            raise NonEnumerable(f"elements of {self.spec.monad.name} are not hashable") from exc
        return RelObject(carrier, carrier, self.holds, name=f"adj({self.spec.name}, {self.m}, {self.v})")


def check_adjacency_monotone(
    spec: DivergenceSpec, carrier: Carrier, values: Iterable[ExtendedValue], budget: SearchBudget
) -> AxiomReport:
    """Δ̃(m, v) ⊆ Δ̃(m′, v′) whenever m ≤ m′ and v ≤ v′, on enumerated pairs."""
    report = AxiomReport(axiom="adjacency-monotone")
    schedule = spec.grade_schedule()
    values = sorted(values)
    thresholds = [(m, n, v, w) for m in schedule for n in schedule if spec.grading.leq(m, n)
                  for v in values for w in values if v <= w]
    elements = spec.monad.elements(carrier, budget)
    stream = bounded_product([thresholds, elements, elements], budget, f"adj-mono:{spec.name}:{carrier.name}")
    report.exhaustive = stream.exhaustive
    for (m, n, v, w), c1, c2 in stream.cases:
        report.cases += 1
        small = AdjacencyRel(spec, m, v, carrier, budget.tolerance)
        large = AdjacencyRel(spec, n, w, carrier, budget.tolerance)
        if small.holds(c1, c2) and not large.holds(c1, c2):
            return report.refute(
                {"carrier": carrier.name, "m": m, "v": v, "m_prime": n, "v_prime": w, "c1": c1, "c2": c2},
                spec.evaluate(n, carrier, c1, c2), w, detail="pair left the larger adjacency relation",
            )
    return report
