"""
Codensity lifting of a graded divergence, decided from the refuting side.

A pair (c₁, c₂) of T X₁ × T X₂ lies in the lifting at (m, v) of a relation X
unless some test arrow refutes it: a target carrier J, a grade n, a budget w
and Kleisli maps (k₁, k₂) : X →̇ Δ̃(n, w) J with

    Δ^{m·n}_J(k₁♯c₁, k₂♯c₂) > v + w.

Finite families can only refute, so a pair that survives is reported as
"not-refuted". For divergences generated by a small carrier Ω, arrows into Ω
suffice, and for DP and TV ``exact_witness`` builds the arrow that attains
the divergence value.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import islice
from typing import Any, Literal

from divlog.core.carriers import Carrier, atom_carriers
from divlog.core.domains import Grade
from divlog.core.search import SearchBudget, bounded_product
from divlog.core.values import ExtendedValue, is_finite
from divlog.divergences.base import DivergenceSpec
from divlog.divergences.privacy import dp_event
from divlog.encoding import encode
from divlog.errors import InvalidTestArrow, PreconditionFailed
from divlog.lifting.relations import RelObject
from divlog.monads.base import TableMap
from divlog.monads.dist import Dist, union_support

logger = logging.getLogger(__name__)

_CHUNK = 256


# ── Test arrows ───────────────────────────────────────────────────────────


@dataclass(frozen=True)
class TestArrow:
    """(k₁, k₂) : X →̇ Δ̃(n, w) J."""

    __test__ = False  # not a pytest class

    target: Carrier
    n: Grade
    w: ExtendedValue
    k1: TableMap
    k2: TableMap
    label: str = ""

    def to_dict(self) -> dict[str, Any]:
        return encode({
            "target": self.target, "n": self.n, "w": self.w,
            "k1": self.k1, "k2": self.k2, **({"label": self.label} if self.label else {}),
        })


def arrow_budget(spec: DivergenceSpec, relation: RelObject, n: Grade, target: Carrier,
                 k1: TableMap, k2: TableMap) -> ExtendedValue:
    """The least w with (k₁, k₂) : X →̇ Δ̃(n, w) J, i.e. sup over X of Δ^n(k₁ x₁, k₂ x₂)."""
    return spec.domain.sup(spec.evaluate(n, target, k1(a), k2(b)) for a, b in relation.pairs())


def validate_test_arrow(spec: DivergenceSpec, relation: RelObject, arrow: TestArrow,
                        tolerance: float = 0.0) -> TestArrow:
    """
    Check the side condition of a test arrow on every pair of ``relation``.

    Raises:
        InvalidTestArrow: with the offending pair and its divergence.
    """
    for a, b in relation.pairs():
        value = spec.evaluate(arrow.n, arrow.target, arrow.k1(a), arrow.k2(b))
        if not spec.domain.leq(value, arrow.w, tolerance):
            raise InvalidTestArrow(
                f"test arrow {arrow.label or '(k1, k2)'} sends ({a!r}, {b!r}) to divergence "
                f"{value} above its budget {arrow.w}",
                witness=encode({"x1": a, "x2": b, "value": value, "w": arrow.w}),
            )
    return arrow


def unit_arrow(spec: DivergenceSpec, relation: RelObject, carrier: Carrier) -> TestArrow:
    """(η, η) into the carrier itself at the unit grade."""
    eta = TableMap.from_function(carrier, spec.monad.unit, label="unit")
    n = spec.grading.unit
    return TestArrow(carrier, n, arrow_budget(spec, relation, n, carrier, eta, eta), eta, eta, label="unit")


def generate_test_arrows(
    spec: DivergenceSpec, relation: RelObject, targets: Sequence[Carrier], budget: SearchBudget,
    salt: str = "",
) -> Iterator[TestArrow]:
    """
    Arrows (k₁, k₂) from the enumerated Kleisli maps into each target, at every
    scheduled grade, each with its least admissible budget. Arrows whose least
    budget is infinite are skipped since they cannot refute.
    """
    grades = spec.grade_schedule()
    for target in targets:
        maps1 = spec.monad.kleisli_maps(relation.left, target, budget)
        maps2 = spec.monad.kleisli_maps(relation.right, target, budget)
        stream = bounded_product([grades, maps1, maps2], budget,
                                 f"arrows:{spec.name}:{relation.name}:{target.name}:{salt}")
        for n, k1, k2 in stream.cases:
            w = arrow_budget(spec, relation, n, target, k1, k2)
            if is_finite(w):
                yield TestArrow(target, n, w, k1, k2)


def random_test_arrows(
    spec: DivergenceSpec, relation: RelObject, targets: Sequence[Carrier], budget: SearchBudget,
    count: int, salt: str = "",
) -> Iterator[TestArrow]:
    """``count`` seeded arrows with targets, grades and images drawn at random."""
    rng = budget.rng(f"random-arrows:{spec.name}:{relation.name}:{salt}")
    grades = spec.grade_schedule()
    for _ in range(count):
        target = targets[int(rng.integers(len(targets)))]
        images = spec.monad.elements(target, budget)
        n = grades[int(rng.integers(len(grades)))]
        k1 = TableMap(relation.left, tuple(images[int(rng.integers(len(images)))] for _ in relation.left))
        k2 = TableMap(relation.right, tuple(images[int(rng.integers(len(images)))] for _ in relation.right))
        w = arrow_budget(spec, relation, n, target, k1, k2)
        if is_finite(w):
            yield TestArrow(target, n, w, k1, k2, label="random")


def omega_test_family(
    spec: DivergenceSpec, omega: Carrier | None, relation: RelObject, budget: SearchBudget,
    random_arrows: int = 0,
) -> Iterator[TestArrow]:
    """
    Every grid arrow into Ω first, then ``random_arrows`` seeded arrows into
    carriers up to ``max_carrier``.
    """
    omega = omega or spec.omega
    if omega is None:
        raise PreconditionFailed(f"{spec.name} is not claimed to be generated by a carrier")
    yield from generate_test_arrows(spec, relation, [omega], budget, salt="omega")
    if random_arrows:
        yield from random_test_arrows(spec, relation, atom_carriers(budget.max_carrier), budget, random_arrows)


# ── Refutation ────────────────────────────────────────────────────────────


@dataclass
class LiftingVerdict:
    """Outcome of a codensity refutation search."""

    verdict: Literal["refuted", "not-refuted"]
    cases: int
    arrow: TestArrow | None = None
    lhs: ExtendedValue | None = None
    rhs: ExtendedValue | None = None

    @property
    def refuted(self) -> bool:
        return self.verdict == "refuted"

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"verdict": self.verdict, "cases": self.cases}
        if self.arrow is not None:
            payload["arrow"] = self.arrow.to_dict()
            payload["lhs"] = encode(self.lhs)
            payload["rhs"] = encode(self.rhs)
        return payload


def arrow_sides(spec: DivergenceSpec, m: Grade, v: ExtendedValue, c1: Any, c2: Any,
                arrow: TestArrow) -> tuple[ExtendedValue, ExtendedValue]:
    """Δ^{m·n}(k₁♯c₁, k₂♯c₂) and v + w."""
    monad = spec.monad
    lhs = spec.evaluate(spec.grading.mul(m, arrow.n), arrow.target,
                        monad.bind(c1, arrow.k1), monad.bind(c2, arrow.k2))
    return lhs, spec.domain.add(v, arrow.w)


def codensity_refute(
    spec: DivergenceSpec,
    m: Grade,
    v: ExtendedValue,
    relation: RelObject,
    c1: Any,
    c2: Any,
    family: Iterable[TestArrow],
    tolerance: float = 0.0,
    validate: bool = True,
    jobs: int = 1,
) -> LiftingVerdict:
    """
    Search ``family`` for an arrow excluding (c₁, c₂) from the lifting of
    ``relation`` at (m, v).

    Args:
        validate: check each arrow's side condition before using it.
        jobs: evaluate chunks of the family on a thread pool; the first
            refuting arrow in family order is reported either way.

    Raises:
        InvalidTestArrow: if ``validate`` and a supplied arrow breaks its side condition.
    """

    def judge(arrow: TestArrow) -> tuple[ExtendedValue, ExtendedValue]:
        if validate:
            validate_test_arrow(spec, relation, arrow, tolerance)
        return arrow_sides(spec, m, v, c1, c2, arrow)

    cases = 0
    arrows = iter(family)
    pool = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        while chunk := list(islice(arrows, _CHUNK)):
            results = list(pool.map(judge, chunk)) if pool else [judge(a) for a in chunk]
            for arrow, (lhs, rhs) in zip(chunk, results, strict=True):
                cases += 1
                if not spec.domain.leq(lhs, rhs, tolerance):
                    logger.info("Codensity: spec=%s refuted by arrow into %s (n=%s w=%s) after %d arrows",
                                spec.name, arrow.target.name, arrow.n, arrow.w, cases)
                    return LiftingVerdict("refuted", cases, arrow, lhs, rhs)
    finally:
        if pool:
            pool.shutdown()
    logger.debug("Codensity: spec=%s not refuted by %d arrows", spec.name, cases)
    return LiftingVerdict("not-refuted", cases)


# ── Exact witnesses ───────────────────────────────────────────────────────


def exact_witness(
    spec: DivergenceSpec, mu1: Dist, mu2: Dist, grade: Grade | None = None,
    carrier: Carrier | None = None,
) -> TestArrow:
    """
    The arrow whose image pair attains Δ^grade(μ₁, μ₂), with k₁ = k₂ and w = 0.

    DP sends the optimal event S* to the point of Ω = 1 and everything else to
    the empty sub-distribution (to a second point when the monad is Dist). TV
    sends A = {μ₁ ≥ μ₂} to 0 and its complement to 1.

    Raises:
        PreconditionFailed: for a spec without a known witness construction.
    """
    carrier = carrier or Carrier.of("support", union_support(mu1, mu2))
    kind = spec.witness_kind
    if kind == "dp":
        alpha = spec.grading.unit if grade is None else grade
        event = dp_event(alpha, mu1, mu2)
        if spec.monad.name == "subdist":
            target = Carrier.atoms(1)
            k = TableMap.from_function(carrier, lambda x: Dist.dirac(0) if x in event else Dist.empty(),
                                       label="dp-witness")
        else:
            target = Carrier.atoms(2)
            k = TableMap.from_function(carrier, lambda x: Dist.dirac(0 if x in event else 1),
                                       label="dp-witness")
    elif kind == "tv":
        target = Carrier.atoms(2)
        k = TableMap.from_function(carrier, lambda x: Dist.dirac(0 if mu1.prob(x) >= mu2.prob(x) else 1),
                                   label="tv-witness")
    else:
        raise PreconditionFailed(f"no exact witness construction for {spec.name}")
    return TestArrow(target, spec.grading.unit, Fraction(0), k, k, label=k.label)


def witness_value(spec: DivergenceSpec, arrow: TestArrow, m: Grade, mu1: Dist, mu2: Dist) -> ExtendedValue:
    """Δ^{m·n}(k₁♯μ₁, k₂♯μ₂) for a witness arrow."""
    lhs, _ = arrow_sides(spec, m, spec.domain.zero, mu1, mu2, arrow)
    return lhs
