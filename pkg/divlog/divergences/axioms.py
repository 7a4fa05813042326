"""
Checkers for the three axioms of an E-relative M-graded divergence on a monad.

    monotonicity        m ≤ m′  ⇒  Δ^{m′}(c₁, c₂) ≤ Δ^m(c₁, c₂)
    unit reflexivity    (x, y) ∈ E I  ⇒  Δ^1(η x, η y) ≤ 0
    composability       Δ^{m·n}(f₁♯c₁, f₂♯c₂) ≤ Δ^m(c₁, c₂) + sup_{(x,y) ∈ E I} Δ^n(f₁ x, f₂ y)

Instances come from the monad enumerators under a SearchBudget: exhaustive
when the product of pools fits ``max_cases``, seeded sampling otherwise.
Sampling can only refute. Known counterexamples of a spec are tried first.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Any

from divlog.core.carriers import Carrier, atom_carriers
from divlog.core.domains import Grade
from divlog.core.search import SearchBudget, bounded_product
from divlog.core.values import ExtendedValue
from divlog.divergences.base import AxiomReport, BasicEndorelation, CompositionCase, DivergenceSpec
from divlog.monads.base import TableMap

logger = logging.getLogger(__name__)


def _carriers(spec: DivergenceSpec, endorelation: BasicEndorelation, budget: SearchBudget) -> list[Carrier]:
    return [c for c in atom_carriers(budget.max_carrier) if endorelation.has_table(c)]


def _grade_pairs(spec: DivergenceSpec) -> list[tuple[Grade, Grade]]:
    schedule = spec.grade_schedule()
    return [(m, n) for m in schedule for n in schedule]


# ── Unit reflexivity ──────────────────────────────────────────────────────


def check_unit_reflexivity(
    spec: DivergenceSpec, endorelation: BasicEndorelation, budget: SearchBudget
) -> AxiomReport:
    """Exact: a finite sup over E I on every carrier up to ``max_carrier``."""
    report = AxiomReport(axiom="unit-reflexivity")
    unit, zero = spec.grading.unit, spec.domain.zero
    carriers = _carriers(spec, endorelation, budget)
    for case in spec.known_cases:
        if endorelation.has_table(case.source):
            carriers.append(case.source)
    for carrier in carriers:
        for x, y in endorelation.pairs(carrier):
            report.cases += 1
            value = spec.evaluate(unit, carrier, spec.monad.unit(x), spec.monad.unit(y))
            if not spec.domain.leq(value, zero, budget.tolerance):
                return report.refute({"carrier": carrier.name, "x": x, "y": y}, value, zero)
    return report


# ── Monotonicity ──────────────────────────────────────────────────────────


def check_monotonicity(spec: DivergenceSpec, budget: SearchBudget) -> AxiomReport:
    report = AxiomReport(axiom="monotonicity")
    schedule = spec.grade_schedule()
    ordered = [(m, n) for m in schedule for n in schedule if m != n and spec.grading.leq(m, n)]
    if not ordered:
        return report
    for carrier in atom_carriers(budget.max_carrier):
        elements = spec.monad.elements(carrier, budget)
        stream = bounded_product([ordered, elements, elements], budget, f"mono:{spec.name}:{carrier.name}")
        report.exhaustive &= stream.exhaustive
        for (m, n), c1, c2 in stream.cases:
            report.cases += 1
            small = spec.evaluate(m, carrier, c1, c2)
            large = spec.evaluate(n, carrier, c1, c2)
            if not spec.domain.leq(large, small, budget.tolerance):
                return report.refute(
                    {"carrier": carrier.name, "m": m, "n": n, "c1": c1, "c2": c2}, large, small,
                    detail="larger grade gave a larger divergence",
                )
    return report


# ── Composability ─────────────────────────────────────────────────────────


class _ContinuationSup:
    """Caches sup_{(x,y) ∈ E I} Δ^n_J(f₁ x, f₂ y) per (n, f₁, f₂)."""

    def __init__(self, spec: DivergenceSpec, endorelation: BasicEndorelation):
        self.spec = spec
        self.endorelation = endorelation
        self.cache: dict[Any, ExtendedValue] = {}

    def __call__(self, n: Grade, source: Carrier, target: Carrier, f1: TableMap, f2: TableMap) -> ExtendedValue:
        key = (n, source.name, target.name, f1.images, f2.images)
        if key not in self.cache:
            self.cache[key] = self.spec.domain.sup(
                self.spec.evaluate(n, target, f1(x), f2(y)) for x, y in self.endorelation.pairs(source)
            )
        return self.cache[key]


def composition_sides(
    spec: DivergenceSpec, endorelation: BasicEndorelation, case: CompositionCase,
    sup: _ContinuationSup | None = None,
) -> tuple[ExtendedValue, ExtendedValue]:
    """Both sides of the composability inequality for one instance."""
    sup = sup or _ContinuationSup(spec, endorelation)
    monad = spec.monad
    lhs = spec.evaluate(
        spec.grading.mul(case.m1, case.m2), case.target,
        monad.bind(case.c1, case.f1), monad.bind(case.c2, case.f2),
    )
    first = spec.evaluate(case.m1, case.source, case.c1, case.c2)
    rhs = spec.domain.add(first, sup(case.m2, case.source, case.target, case.f1, case.f2))
    return lhs, rhs


def _case_witness(case: CompositionCase) -> dict[str, Any]:
    return {
        "m1": case.m1, "m2": case.m2, "I": case.source, "J": case.target,
        "c1": case.c1, "c2": case.c2, "f1": case.f1, "f2": case.f2,
        **({"label": case.label} if case.label else {}),
    }


def _check_pair(
    spec: DivergenceSpec, endorelation: BasicEndorelation, budget: SearchBudget,
    source: Carrier, target: Carrier, limit: int,
) -> AxiomReport:
    report = AxiomReport(axiom="composability")
    sup = _ContinuationSup(spec, endorelation)
    elements = spec.monad.elements(source, budget)
    maps = spec.monad.kleisli_maps(source, target, budget)
    stream = bounded_product(
        [_grade_pairs(spec), elements, elements, maps, maps], budget,
        f"comp:{spec.name}:{endorelation.name}:{source.name}:{target.name}", limit=limit,
    )
    report.exhaustive = stream.exhaustive
    for (m1, m2), c1, c2, f1, f2 in stream.cases:
        report.cases += 1
        case = CompositionCase(m1, m2, source, target, c1, c2, f1, f2)
        lhs, rhs = composition_sides(spec, endorelation, case, sup)
        if not spec.domain.leq(lhs, rhs, budget.tolerance):
            return report.refute(_case_witness(case), lhs, rhs)
    return report


def check_composability(
    spec: DivergenceSpec, endorelation: BasicEndorelation, budget: SearchBudget, jobs: int = 1
) -> AxiomReport:
    """
    Search for a violation of E-composability.

    Carrier pairs (I, J) are independent; with ``jobs`` > 1 they run on a thread
    pool and the first refutation in (I, J) order is reported, so the verdict
    does not depend on scheduling.
    """
    report = AxiomReport(axiom="composability")
    for case in spec.known_cases:
        if not endorelation.has_table(case.source):
            continue
        report.cases += 1
        lhs, rhs = composition_sides(spec, endorelation, case)
        if not spec.domain.leq(lhs, rhs, budget.tolerance):
            report.refute(_case_witness(case), lhs, rhs, detail="known counterexample")
            logger.info("Composability: spec=%s verdict=refuted (known case %s)", spec.name, case.label)
            return report

    carriers = _carriers(spec, endorelation, budget)
    pairs = [(i, j) for i in carriers for j in carriers]
    limit = max(1, budget.max_cases // max(1, len(pairs)))

    def run(pair: tuple[Carrier, Carrier]) -> AxiomReport:
        return _check_pair(spec, endorelation, budget, pair[0], pair[1], limit)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results: Sequence[AxiomReport] = list(pool.map(run, pairs))
    else:
        results = []
        for pair in pairs:
            results.append(run(pair))
            if results[-1].refuted:
                break

    for result in results:
        report.cases += result.cases
        report.exhaustive &= result.exhaustive
        if result.refuted:
            report.refute(result.witness, result.lhs, result.rhs)
            break
    logger.info("Composability: spec=%s verdict=%s cases=%d exhaustive=%s",
                spec.name, report.verdict, report.cases, report.exhaustive)
    return report


# ── All three ─────────────────────────────────────────────────────────────


def check_axioms(
    spec: DivergenceSpec,
    endorelation: BasicEndorelation | None,
    budget: SearchBudget,
    jobs: int = 1,
) -> tuple[AxiomReport, AxiomReport, AxiomReport]:
    """
    Monotonicity, unit reflexivity and composability of ``spec`` relative to
    ``endorelation`` (the divergence's own when None).

    Returns:
        The three reports in that order.
    """
    endorelation = endorelation or spec.endorelation
    reports = (
        check_monotonicity(spec, budget),
        check_unit_reflexivity(spec, endorelation, budget),
        check_composability(spec, endorelation, budget, jobs=jobs),
    )
    for report in reports:
        report.extras.setdefault("endorelation", endorelation.name)
    return reports


def overall_verdict(reports: Sequence[AxiomReport]) -> str:
    """refuted if any report refutes, inconclusive if any is, else passed."""
    verdicts = {r.verdict for r in reports}
    for verdict in ("refuted", "inconclusive"):
        if verdict in verdicts:
            return verdict
    return "passed"
