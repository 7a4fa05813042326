"""
Properties of the codensity lifting of an E-relative graded divergence.

    fundamental property   (C) adjacent pairs survive every test arrow
                           (S) non-adjacent pairs are excluded by some arrow
    strength law           Δ^m(θ⟨x₁,c₁⟩, θ⟨x₂,c₂⟩) ≤ Δ^m(c₁, c₂) for (x₁,x₂) ∈ E I
    enrichment             d(η, η) ≤ 0 and d(g₁•f₁, g₂•f₂) ≤ d(f₁,f₂) + d(g₁,g₂)
                           with d(f₁, f₂) = sup_{(x₁,x₂) ∈ E I} Δ(f₁ x₁, f₂ x₂)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

from divlog.core.carriers import Carrier, atom_carriers
from divlog.core.domains import Grade
from divlog.core.search import SearchBudget, bounded_product
from divlog.core.values import ExtendedValue, is_finite
from divlog.divergences.base import AxiomReport, BasicEndorelation, DivergenceSpec
from divlog.errors import PreconditionFailed
from divlog.lifting.codensity import (
    TestArrow,
    arrow_budget,
    arrow_sides,
    exact_witness,
    generate_test_arrows,
    unit_arrow,
)
from divlog.lifting.relations import RelObject
from divlog.monads.base import TableMap, kleisli_compose, strength

logger = logging.getLogger(__name__)

# Arrows tried per excluded pair once the unit and exact witnesses failed
SEARCH_LIMIT = 200


def _carriers(endorelation: BasicEndorelation, budget: SearchBudget) -> list[Carrier]:
    return [c for c in atom_carriers(budget.max_carrier) if endorelation.has_table(c)]


def _targets(spec: DivergenceSpec, budget: SearchBudget) -> list[Carrier]:
    return [spec.omega] if spec.omega is not None else atom_carriers(budget.max_carrier)


# ── Fundamental property ──────────────────────────────────────────────────


@dataclass
class FundamentalReport:
    """Both directions of the fundamental property."""

    c: AxiomReport
    s: AxiomReport

    @property
    def verdict(self) -> str:
        for verdict in ("refuted", "inconclusive"):
            if verdict in (self.c.verdict, self.s.verdict):
                return verdict
        return "passed"

    def to_dict(self) -> dict[str, Any]:
        return {"verdict": self.verdict, "C": self.c.to_dict(), "S": self.s.to_dict()}


def _direction_c(spec: DivergenceSpec, endorelation: BasicEndorelation, budget: SearchBudget) -> AxiomReport:
    report = AxiomReport(axiom="fundamental-C")
    tol = budget.tolerance

    for case in spec.known_cases:
        if not endorelation.has_table(case.source):
            continue
        relation = RelObject.from_endorelation(endorelation, case.source)
        v = spec.evaluate(case.m1, case.source, case.c1, case.c2)
        w = arrow_budget(spec, relation, case.m2, case.target, case.f1, case.f2)
        arrow = TestArrow(case.target, case.m2, w, case.f1, case.f2, label=case.label)
        report.cases += 1
        lhs, rhs = arrow_sides(spec, case.m1, v, case.c1, case.c2, arrow)
        if not spec.domain.leq(lhs, rhs, tol):
            return report.refute({"m": case.m1, "v": v, "I": case.source, "c1": case.c1, "c2": case.c2,
                                  "arrow": arrow.to_dict()}, lhs, rhs, detail="known counterexample")

    carriers, targets = _carriers(endorelation, budget), _targets(spec, budget)
    grades = spec.grade_schedule()
    limit = max(1, budget.max_cases // max(1, len(carriers) * len(targets)))
    for source in carriers:
        relation = RelObject.from_endorelation(endorelation, source)
        elements = spec.monad.elements(source, budget)
        for target in targets:
            maps = spec.monad.kleisli_maps(source, target, budget)
            stream = bounded_product([grades, grades, elements, elements, maps, maps], budget,
                                     f"fundamental-C:{spec.name}:{source.name}:{target.name}", limit=limit)
            report.exhaustive &= stream.exhaustive
            for m, n, c1, c2, k1, k2 in stream.cases:
                # the tightest v that keeps (c1, c2) adjacent
                v = spec.evaluate(m, source, c1, c2)
                w = arrow_budget(spec, relation, n, target, k1, k2)
                if not (is_finite(v) and is_finite(w)):
                    continue
                report.cases += 1
                arrow = TestArrow(target, n, w, k1, k2)
                lhs, rhs = arrow_sides(spec, m, v, c1, c2, arrow)
                if not spec.domain.leq(lhs, rhs, tol):
                    return report.refute({"m": m, "v": v, "I": source, "c1": c1, "c2": c2,
                                          "arrow": arrow.to_dict()}, lhs, rhs,
                                         detail="an adjacent pair is refuted by a test arrow")
    return report


def _excluded_threshold(spec: DivergenceSpec, value: ExtendedValue, budget: SearchBudget) -> ExtendedValue | None:
    """The largest finite sample of the domain strictly below ``value``."""
    below = [s for s in spec.domain.samples(budget.grid_denom) if is_finite(s)
             and not spec.domain.leq(value, s, 0.0)]
    if not below:
        return None
    best = below[0]
    for s in below[1:]:
        best = spec.domain.join(best, s)
    return best


def _excluding_arrow(
    spec: DivergenceSpec, relation: RelObject, source: Carrier, m: Grade, v: ExtendedValue,
    c1: Any, c2: Any, budget: SearchBudget,
) -> tuple[TestArrow | None, int]:
    tol = budget.tolerance
    candidates: list[TestArrow] = []
    if spec.witness_kind is not None:
        candidates.append(exact_witness(spec, c1, c2, m, carrier=source))
    candidates.append(unit_arrow(spec, relation, source))
    tried = 0
    for arrow in candidates:
        tried += 1
        lhs, rhs = arrow_sides(spec, m, v, c1, c2, arrow)
        if not spec.domain.leq(lhs, rhs, tol):
            return arrow, tried
    if spec.witness_kind is not None:
        return None, tried
    for arrow in generate_test_arrows(spec, relation, _targets(spec, budget),
                                      budget.replace(max_cases=SEARCH_LIMIT), salt="exclude"):
        tried += 1
        lhs, rhs = arrow_sides(spec, m, v, c1, c2, arrow)
        if not spec.domain.leq(lhs, rhs, tol):
            return arrow, tried
    return None, tried


def _direction_s(spec: DivergenceSpec, endorelation: BasicEndorelation, budget: SearchBudget) -> AxiomReport:
    report = AxiomReport(axiom="fundamental-S")
    carriers = _carriers(endorelation, budget)
    grades = spec.grade_schedule()
    limit = max(1, budget.max_cases // max(1, len(carriers)))
    unresolved = 0
    for source in carriers:
        relation = RelObject.from_endorelation(endorelation, source)
        elements = spec.monad.elements(source, budget)
        stream = bounded_product([grades, elements, elements], budget,
                                 f"fundamental-S:{spec.name}:{source.name}", limit=limit)
        report.exhaustive &= stream.exhaustive
        for m, c1, c2 in stream.cases:
            value = spec.evaluate(m, source, c1, c2)
            v = _excluded_threshold(spec, value, budget)
            if v is None:
                continue
            report.cases += 1
            arrow, _ = _excluding_arrow(spec, relation, source, m, v, c1, c2, budget)
            if arrow is not None:
                continue
            witness = {"m": m, "v": v, "I": source, "c1": c1, "c2": c2, "value": value}
            if spec.witness_kind is not None:
                return report.refute(witness, value, v, detail="the exact witness did not exclude the pair")
            unresolved += 1
            report.extras.setdefault("unresolved", witness)
    if unresolved:
        report.verdict = "inconclusive"
        report.exhaustive = False
        report.detail = f"no excluding arrow found for {unresolved} pair(s) (sampled)"
    return report


def check_fundamental_property(
    spec: DivergenceSpec, endorelation: BasicEndorelation | None, budget: SearchBudget
) -> FundamentalReport:
    """
    (C) on enumerated instances with v the divergence of the pair itself;
    (S) with v the largest domain sample below it, excluded by the exact
    witness (DP, TV), the unit arrow, or a bounded arrow search.
    """
    endorelation = endorelation or spec.endorelation
    result = FundamentalReport(_direction_c(spec, endorelation, budget), _direction_s(spec, endorelation, budget))
    logger.info("Fundamental property: spec=%s E=%s C=%s S=%s", spec.name, endorelation.name,
                result.c.verdict, result.s.verdict)
    return result


# ── Strength law ──────────────────────────────────────────────────────────


def _check_product_condition(endorelation: BasicEndorelation, left: Carrier, right: Carrier) -> None:
    """E I ×̇ E J ⊆ E(I × J); automatic for Eq and Top."""
    if endorelation.kind != "custom":
        return
    product = left.product(right)
    if not endorelation.has_table(product):
        raise PreconditionFailed(f"custom endorelation {endorelation.name} has no table for {product.name}")
    for x1, x2 in endorelation.pairs(left):
        for y1, y2 in endorelation.pairs(right):
            if not endorelation.holds(product, (x1, y1), (x2, y2)):
                raise PreconditionFailed(
                    f"{endorelation.name} on {product.name} misses (({x1!r}, {y1!r}), ({x2!r}, {y2!r}))"
                )


def check_strength_law(
    spec: DivergenceSpec, endorelation: BasicEndorelation | None, budget: SearchBudget
) -> AxiomReport:
    """
    Raises:
        PreconditionFailed: when a custom E breaks E I ×̇ E J ⊆ E(I × J).
    """
    endorelation = endorelation or spec.endorelation
    report = AxiomReport(axiom="strength")
    carriers = _carriers(endorelation, budget)
    for left in carriers:
        for right in carriers:
            _check_product_condition(endorelation, left, right)
    grades = spec.grade_schedule()
    monad = spec.monad
    limit = max(1, budget.max_cases // max(1, len(carriers) ** 2))
    for left in carriers:
        for right in carriers:
            product = left.product(right)
            elements = monad.elements(right, budget)
            stream = bounded_product([grades, endorelation.pairs(left), elements, elements], budget,
                                     f"strength:{spec.name}:{left.name}:{right.name}", limit=limit)
            report.exhaustive &= stream.exhaustive
            for m, (x1, x2), c1, c2 in stream.cases:
                report.cases += 1
                lhs = spec.evaluate(m, product, strength(monad, x1, c1), strength(monad, x2, c2))
                rhs = spec.evaluate(m, right, c1, c2)
                if not spec.domain.leq(lhs, rhs, budget.tolerance):
                    return report.refute({"m": m, "I": left, "J": right, "x1": x1, "x2": x2,
                                          "c1": c1, "c2": c2}, lhs, rhs)
    logger.info("Strength law: spec=%s E=%s verdict=%s cases=%d", spec.name, endorelation.name,
                report.verdict, report.cases)
    return report


# ── Enrichment ────────────────────────────────────────────────────────────


def hom_distance(spec: DivergenceSpec, endorelation: BasicEndorelation, m: Grade, source: Carrier,
                 target: Carrier, f1: Any, f2: Any) -> ExtendedValue:
    """d^m_{I,J}(f₁, f₂) = sup_{(x₁,x₂) ∈ E I} Δ^m_J(f₁ x₁, f₂ x₂)."""
    return spec.domain.sup(spec.evaluate(m, target, f1(x), f2(y)) for x, y in endorelation.pairs(source))


def check_enrichment(
    spec: DivergenceSpec, endorelation: BasicEndorelation | None, budget: SearchBudget
) -> AxiomReport:
    """
    The hom-distances d^m make the Kleisli category enriched: identities at
    distance 0 and composition subadditive, d^{m·n}(g₁•f₁, g₂•f₂) ≤ d^m(f₁, f₂) + d^n(g₁, g₂).
    Known counterexamples are replayed as morphisms out of the one-point carrier.
    """
    endorelation = endorelation or spec.endorelation
    report = AxiomReport(axiom="enrichment")
    monad, domain, tol = spec.monad, spec.domain, budget.tolerance
    unit = spec.grading.unit
    carriers = _carriers(endorelation, budget)

    for carrier in carriers:
        report.cases += 1
        d = hom_distance(spec, endorelation, unit, carrier, carrier, monad.unit, monad.unit)
        if not domain.leq(d, domain.zero, tol):
            return report.refute({"law": "identity", "I": carrier}, d, domain.zero)

    def compose_check(m: Grade, n: Grade, i: Carrier, j: Carrier, k: Carrier,
                      f1: Any, f2: Any, g1: Any, g2: Any) -> tuple[ExtendedValue, ExtendedValue]:
        lhs = hom_distance(spec, endorelation, spec.grading.mul(m, n), i, k,
                           kleisli_compose(monad, g1, f1), kleisli_compose(monad, g2, f2))
        rhs = domain.add(hom_distance(spec, endorelation, m, i, j, f1, f2),
                         hom_distance(spec, endorelation, n, j, k, g1, g2))
        return lhs, rhs

    point = Carrier.atoms(1)
    if endorelation.has_table(point):
        for case in spec.known_cases:
            if not endorelation.has_table(case.source):
                continue
            f1 = TableMap(point, (case.c1,), label="c1")
            f2 = TableMap(point, (case.c2,), label="c2")
            report.cases += 1
            lhs, rhs = compose_check(case.m1, case.m2, point, case.source, case.target, f1, f2, case.f1, case.f2)
            if not domain.leq(lhs, rhs, tol):
                return report.refute({"law": "composition", "m": case.m1, "n": case.m2, "I": point,
                                      "J": case.source, "K": case.target, "f1": f1, "f2": f2,
                                      "g1": case.f1, "g2": case.f2}, lhs, rhs, detail="known counterexample")

    grades = spec.grade_schedule()
    triples = [(i, j, k) for i in carriers for j in carriers for k in carriers]
    limit = max(1, budget.max_cases // max(1, len(triples)))
    for i, j, k in triples:
        maps_ij = monad.kleisli_maps(i, j, budget)
        maps_jk = monad.kleisli_maps(j, k, budget)
        stream = bounded_product([grades, grades, maps_ij, maps_ij, maps_jk, maps_jk], budget,
                                 f"enrichment:{spec.name}:{i.name}:{j.name}:{k.name}", limit=limit)
        report.exhaustive &= stream.exhaustive
        for m, n, f1, f2, g1, g2 in stream.cases:
            report.cases += 1
            lhs, rhs = compose_check(m, n, i, j, k, f1, f2, g1, g2)
            if not domain.leq(lhs, rhs, tol):
                return report.refute({"law": "composition", "m": m, "n": n, "I": i, "J": j, "K": k,
                                      "f1": f1, "f2": f2, "g1": g1, "g2": g2}, lhs, rhs)
    logger.info("Enrichment: spec=%s E=%s verdict=%s cases=%d exhaustive=%s", spec.name,
                endorelation.name, report.verdict, report.cases, report.exhaustive)
    return report
