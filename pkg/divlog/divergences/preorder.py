"""
Preorders on monads and their Bool-valued divergences.

A preorder ⊑ on T corresponds to the Eq-relative Bool-divergence
Δ^⊑(c₁, c₂) = 1 if c₁ ⊑ c₂ else 0 (Bool orders 1 below 0), and back through
the adjacency relation {(c₁, c₂) | Δ(c₁, c₂) ≤ 1}.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from divlog.core.carriers import Carrier, atom_carriers
from divlog.core.domains import BOOL, TRIVIAL_GRADING
from divlog.core.search import SearchBudget, bounded_product
from divlog.divergences.base import EQ, AxiomReport, DivergenceSpec
from divlog.errors import NotAPreorder, PreconditionFailed
from divlog.monads.base import Monad
from divlog.monads.cost import PCOST, CostSet

logger = logging.getLogger(__name__)

Relation = Callable[[Carrier, Any, Any], bool]


@dataclass(frozen=True)
class MonadPreorder:
    """A relation ⊑_I on T I for every carrier I."""

    name: str
    monad: Monad
    relation: Relation = field(repr=False)
    # Carriers the relation is defined on; None means every carrier
    carriers: tuple[str, ...] | None = None

    def holds(self, carrier: Carrier, c1: Any, c2: Any) -> bool:
        if self.carriers is not None and carrier.name not in self.carriers:
            raise PreconditionFailed(f"preorder {self.name} is only defined on {list(self.carriers)}")
        return bool(self.relation(carrier, c1, c2))

    def table(self, carrier: Carrier, elements: Sequence[Any]) -> np.ndarray:
        """Boolean relation matrix over ``elements``."""
        return np.array([[self.holds(carrier, a, b) for b in elements] for a in elements], dtype=bool)


# ── Shipped preorders ─────────────────────────────────────────────────────


def equality_preorder(monad: Monad) -> MonadPreorder:
    return MonadPreorder("eq", monad, lambda carrier, c1, c2: monad.equal(c1, c2))


def total_preorder(monad: Monad) -> MonadPreorder:
    return MonadPreorder("total", monad, lambda carrier, c1, c2: True)


def inclusion_preorder() -> MonadPreorder:
    """A ⊑ B iff A ⊆ B on P(ℕ × −)."""

    def included(carrier: Carrier, a: CostSet, b: CostSet) -> bool:
        return a.entries <= b.entries

    return MonadPreorder("inclusion", PCOST, included)


def omega_preorder(base: MonadPreorder, omega: Carrier, budget: SearchBudget) -> MonadPreorder:
    """[≤]^Ω: c₁ ⊑ c₂ iff g♯c₁ ≤_Ω g♯c₂ for every g : I → T Ω under the budget."""
    monad = base.monad

    def derived(carrier: Carrier, c1: Any, c2: Any) -> bool:
        for g in monad.kleisli_maps(carrier, omega, budget):
            if not base.holds(omega, monad.bind(c1, g), monad.bind(c2, g)):
                return False
        return True

    return MonadPreorder(f"{base.name}^{omega.name}", monad, derived)


def reflexive_transitive_closure(matrix: np.ndarray) -> np.ndarray:
    """Warshall closure of a boolean adjacency matrix, diagonal included."""
    closure = matrix.astype(bool) | np.eye(matrix.shape[0], dtype=bool)
    for k in range(closure.shape[0]):
        closure |= closure[:, k : k + 1] & closure[k : k + 1, :]
    return closure


def random_preorder(
    monad: Monad, carrier: Carrier, budget: SearchBudget, density: float = 0.05
) -> MonadPreorder:
    """A seeded random preorder on the enumerated elements of T ``carrier``."""
    elements = list(monad.elements(carrier, budget))
    rng = budget.rng(f"preorder:{monad.name}:{carrier.name}")
    closure = reflexive_transitive_closure(rng.random((len(elements), len(elements))) < density)
    index = {c: i for i, c in enumerate(elements)}

    def lookup(_: Carrier, c1: Any, c2: Any) -> bool:
        try:
            return bool(closure[index[c1], index[c2]])
        except KeyError as exc:
            raise PreconditionFailed("random preorder queried outside its enumerated elements") from exc

    logger.debug("Random preorder: monad=%s carrier=%s elements=%d related=%d",
                 monad.name, carrier.name, len(elements), int(closure.sum()))
    return MonadPreorder(f"random({carrier.name})", monad, lookup, carriers=(carrier.name,))


# ── The bijection ─────────────────────────────────────────────────────────


def preorder_to_divergence(preorder: MonadPreorder) -> DivergenceSpec:
    return DivergenceSpec(
        name=f"preorder-{preorder.name}",
        monad=preorder.monad,
        grading=TRIVIAL_GRADING,
        domain=BOOL,
        endorelation=EQ,
        evaluator=lambda m, carrier, c1, c2: Fraction(1) if preorder.holds(carrier, c1, c2) else Fraction(0),
        description=f"Bool-divergence of the preorder {preorder.name}",
    )


def _carriers_for(preorder_carriers: tuple[str, ...] | None, budget: SearchBudget,
                  carriers: Sequence[Carrier] | None) -> list[Carrier]:
    if carriers is not None:
        return list(carriers)
    every = atom_carriers(budget.max_carrier)
    if preorder_carriers is None:
        return every
    return [c for c in every if c.name in preorder_carriers]


def divergence_to_preorder(
    spec: DivergenceSpec, budget: SearchBudget, carriers: Sequence[Carrier] | None = None
) -> MonadPreorder:
    """
    The adjacency relation of a Bool-divergence at grade 1, checked to be a preorder.

    Raises:
        PreconditionFailed: if ``spec`` is not Bool-valued.
        NotAPreorder: if reflexivity or transitivity fails on an enumerated carrier.
    """
    if spec.domain is not BOOL:
        raise PreconditionFailed(f"{spec.name} is valued in {spec.domain.name}, not Bool")

    def adjacent(carrier: Carrier, c1: Any, c2: Any) -> bool:
        return BOOL.leq(spec.evaluate(spec.grading.unit, carrier, c1, c2), Fraction(1))

    name = spec.name.removeprefix("preorder-")
    preorder = MonadPreorder(name, spec.monad, adjacent)
    for carrier in carriers if carriers is not None else atom_carriers(budget.max_carrier):
        elements = list(spec.monad.elements(carrier, budget))
        table = preorder.table(carrier, elements)
        missing = np.flatnonzero(~np.diag(table))
        if missing.size:
            c = elements[int(missing[0])]
            raise NotAPreorder(f"{spec.name} is not reflexive on {carrier.name}",
                               witness={"carrier": carrier.name, "c": c})
        composed = (table.astype(np.int64) @ table.astype(np.int64)) > 0
        broken = np.argwhere(composed & ~table)
        if broken.size:
            i, k = (int(v) for v in broken[0])
            j = int(np.flatnonzero(table[i] & table[:, k])[0])
            raise NotAPreorder(
                f"{spec.name} is not transitive on {carrier.name}",
                witness={"carrier": carrier.name, "c1": elements[i], "c2": elements[j], "c3": elements[k]},
            )
    return preorder


@dataclass
class Roundtrip:
    """The converted object and whether converting back reproduced the input."""

    converted: MonadPreorder | DivergenceSpec
    report: AxiomReport


def preorder_roundtrip(
    source: MonadPreorder | DivergenceSpec,
    budget: SearchBudget,
    carriers: Sequence[Carrier] | None = None,
) -> Roundtrip:
    """
    Convert a preorder to its Bool-divergence (or back) and compare the round
    trip with the input on every enumerated pair.
    """
    report = AxiomReport(axiom="preorder-roundtrip")
    original = source
    if isinstance(source, MonadPreorder):
        chosen = _carriers_for(source.carriers, budget, carriers)
        converted: MonadPreorder | DivergenceSpec = preorder_to_divergence(source)
        back = divergence_to_preorder(converted, budget, chosen)
    else:
        chosen = _carriers_for(None, budget, carriers)
        converted = divergence_to_preorder(source, budget, chosen)
        back = preorder_to_divergence(converted)

    for carrier in chosen:
        elements = list(original.monad.elements(carrier, budget))
        if isinstance(original, MonadPreorder):
            before, after = original.table(carrier, elements), back.table(carrier, elements)
        else:
            unit = original.grading.unit
            before = np.array([[original.evaluate(unit, carrier, a, b) == 1 for b in elements] for a in elements])
            after = np.array([[back.evaluate(unit, carrier, a, b) == 1 for b in elements] for a in elements])
        report.cases += len(elements) ** 2
        diff = np.argwhere(before != after)
        if diff.size:
            i, j = (int(v) for v in diff[0])
            return Roundtrip(converted, report.refute(
                {"carrier": carrier.name, "c1": elements[i], "c2": elements[j]},
                Fraction(int(before[i, j])), Fraction(int(after[i, j])),
                detail="round trip changed the relation",
            ))
    logger.info("Preorder round trip: source=%s cases=%d verdict=%s",
                getattr(original, "name", "?"), report.cases, report.verdict)
    return Roundtrip(converted, report)


def check_preorder_laws(
    preorder: MonadPreorder, budget: SearchBudget, carriers: Sequence[Carrier] | None = None
) -> AxiomReport:
    """
    Reflexivity, transitivity, substitutivity and congruence on enumerated
    instances (maps I → T I; sampled beyond ``max_cases``).
    """
    report = AxiomReport(axiom="preorder-laws")
    monad = preorder.monad
    for carrier in _carriers_for(preorder.carriers, budget, carriers):
        elements = list(monad.elements(carrier, budget))
        table = preorder.table(carrier, elements)
        report.cases += len(elements)
        missing = np.flatnonzero(~np.diag(table))
        if missing.size:
            c = elements[int(missing[0])]
            return report.refute({"law": "reflexivity", "carrier": carrier.name, "c": c},
                                 Fraction(0), Fraction(1))
        composed = (table.astype(np.int64) @ table.astype(np.int64)) > 0
        broken = np.argwhere(composed & ~table)
        if broken.size:
            i, k = (int(v) for v in broken[0])
            return report.refute({"law": "transitivity", "carrier": carrier.name,
                                  "c1": elements[i], "c3": elements[k]}, Fraction(0), Fraction(1))

        index = {c: i for i, c in enumerate(elements)}
        related = [(elements[i], elements[j]) for i, j in np.argwhere(table)]
        maps = monad.kleisli_maps(carrier, carrier, budget)

        stream = bounded_product([related, maps], budget, f"preorder:subst:{preorder.name}:{carrier.name}")
        report.exhaustive &= stream.exhaustive
        for (c1, c2), f in stream.cases:
            report.cases += 1
            if not _related(preorder, carrier, index, table, monad.bind(c1, f), monad.bind(c2, f)):
                return report.refute({"law": "substitutivity", "carrier": carrier.name,
                                      "c1": c1, "c2": c2, "f": f}, Fraction(0), Fraction(1))

        stream = bounded_product([elements, maps, maps], budget, f"preorder:congr:{preorder.name}:{carrier.name}")
        report.exhaustive &= stream.exhaustive
        for c, f1, f2 in stream.cases:
            if not all(_related(preorder, carrier, index, table, f1(x), f2(x)) for x in carrier):
                continue
            report.cases += 1
            if not _related(preorder, carrier, index, table, monad.bind(c, f1), monad.bind(c, f2)):
                return report.refute({"law": "congruence", "carrier": carrier.name,
                                      "c": c, "f1": f1, "f2": f2}, Fraction(0), Fraction(1))

    logger.info("Preorder laws: preorder=%s verdict=%s cases=%d", preorder.name, report.verdict, report.cases)
    return report


def _related(preorder: MonadPreorder, carrier: Carrier, index: dict, table: np.ndarray, a: Any, b: Any) -> bool:
    if a in index and b in index:
        return bool(table[index[a], index[b]])
    return preorder.holds(carrier, a, b)
