"""
Divergence specifications, basic endorelations and axiom reports.

A DivergenceSpec bundles everything a checker needs about one catalogue
entry: the monad it lives on, its grading monoid, its value domain, the basic
endorelation it is claimed relative to, and an evaluator
(m, I, c₁, c₂) ↦ Δ^m_I(c₁, c₂).
"""

from __future__ import annotations

import dataclasses
import logging
from collections.abc import Callable, Hashable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Any, Literal

from divlog.core.carriers import Carrier
from divlog.core.domains import DivergenceDomain, Grade, GradingMonoid
from divlog.core.values import ExtendedValue
from divlog.encoding import encode
from divlog.errors import PreconditionFailed
from divlog.monads.base import Monad, TableMap

logger = logging.getLogger(__name__)

Evaluator = Callable[[Grade, Carrier, Any, Any], ExtendedValue]


# ── Basic endorelations ───────────────────────────────────────────────────


@dataclass(frozen=True)
class BasicEndorelation:
    """Eq, Top, or a custom relation given per carrier name."""

    kind: Literal["eq", "top", "custom"]
    tables: Mapping[str, frozenset] = field(default_factory=dict, hash=False, compare=False)
    label: str = ""

    @property
    def name(self) -> str:
        return self.label or self.kind

    def pairs(self, carrier: Carrier) -> list[tuple[Hashable, Hashable]]:
        if self.kind == "eq":
            return [(x, x) for x in carrier]
        if self.kind == "top":
            return list(carrier.pairs())
        try:
            table = self.tables[carrier.name]
        except KeyError as exc:
            raise PreconditionFailed(
                f"custom endorelation {self.name} has no table for carrier {carrier.name}"
            ) from exc
        return [(x, y) for x, y in carrier.pairs() if (x, y) in table]

    def holds(self, carrier: Carrier, x: Hashable, y: Hashable) -> bool:
        if self.kind == "eq":
            return x == y
        if self.kind == "top":
            return True
        return (x, y) in self.tables.get(carrier.name, frozenset())

    def has_table(self, carrier: Carrier) -> bool:
        return self.kind != "custom" or carrier.name in self.tables


EQ = BasicEndorelation("eq")
TOP = BasicEndorelation("top")


def custom_endorelation(tables: Mapping[str, Any], label: str = "custom") -> BasicEndorelation:
    return BasicEndorelation(
        "custom", {name: frozenset(map(tuple, pairs)) for name, pairs in tables.items()}, label
    )


def parse_endorelation(text: str) -> BasicEndorelation:
    text = text.strip().lower()
    if text == "eq":
        return EQ
    if text == "top":
        return TOP
    raise PreconditionFailed(f"unknown basic endorelation {text!r} (expected eq or top)")


# ── Divergence specification ──────────────────────────────────────────────


@dataclass(frozen=True)
class CompositionCase:
    """One instance of the composability inequality."""

    m1: Grade
    m2: Grade
    source: Carrier
    target: Carrier
    c1: Any
    c2: Any
    f1: TableMap
    f2: TableMap
    label: str = ""


@dataclass(frozen=True)
class DivergenceSpec:
    """A catalogue entry: Δ on ``monad`` graded by ``grading`` valued in ``domain``."""

    name: str
    monad: Monad
    grading: GradingMonoid
    domain: DivergenceDomain
    endorelation: BasicEndorelation
    evaluator: Evaluator = field(repr=False)
    exact: bool = True
    # Grades the checkers sweep; the unit is always included
    grades: tuple = ()
    known_cases: tuple[CompositionCase, ...] = ()
    # Carrier the divergence is claimed to be generated by, if any
    omega: Carrier | None = None
    witness_kind: Literal["dp", "tv"] | None = None
    description: str = ""

    def evaluate(self, m: Grade, carrier: Carrier, c1: Any, c2: Any) -> ExtendedValue:
        self.grading.require(m)
        return self.domain.require(self.evaluator(m, carrier, c1, c2))

    def grade_schedule(self) -> list[Grade]:
        schedule = [self.grading.unit]
        for grade in self.grades:
            if grade not in schedule:
                schedule.append(grade)
        return schedule

    def with_cases(self, *cases: CompositionCase) -> DivergenceSpec:
        return dataclasses.replace(self, known_cases=self.known_cases + cases)

    def relative_to(self, endorelation: BasicEndorelation) -> DivergenceSpec:
        return dataclasses.replace(self, endorelation=endorelation)


def eval_divergence(spec: DivergenceSpec, m: Grade, carrier: Carrier, c1: Any, c2: Any) -> ExtendedValue:
    """Δ^m_I(c₁, c₂) for a catalogue entry (validates grade and value)."""
    return spec.evaluate(m, carrier, c1, c2)


# ── Reports ───────────────────────────────────────────────────────────────

Verdict = Literal["passed", "refuted", "inconclusive"]


@dataclass
class AxiomReport:
    """
    Verdict of one property check.

    ``witness`` holds the raw inputs of a failure (replayable), ``lhs``/``rhs``
    the two sides of the violated inequality.
    """

    axiom: str
    verdict: Verdict = "passed"
    cases: int = 0
    exhaustive: bool = True
    witness: dict[str, Any] | None = None
    lhs: ExtendedValue | None = None
    rhs: ExtendedValue | None = None
    detail: str = ""
    extras: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "passed"

    @property
    def refuted(self) -> bool:
        return self.verdict == "refuted"

    def refute(self, witness: dict[str, Any], lhs: ExtendedValue, rhs: ExtendedValue,
               detail: str = "") -> AxiomReport:
        self.verdict = "refuted"
        self.witness = witness
        self.lhs, self.rhs = lhs, rhs
        self.detail = detail
        return self

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "axiom": self.axiom,
            "verdict": self.verdict,
            "cases": self.cases,
            "exhaustive": self.exhaustive,
        }
        if self.witness is not None:
            payload["witness"] = encode(self.witness)
            payload["lhs"] = encode(self.lhs)
            payload["rhs"] = encode(self.rhs)
        if self.detail:
            payload["detail"] = self.detail
        if self.extras:
            payload["extras"] = encode(self.extras)
        return payload


def iter_pairs(pool: list[Any]) -> Iterator[tuple[Any, Any]]:
    for a in pool:
        for b in pool:
            yield a, b
