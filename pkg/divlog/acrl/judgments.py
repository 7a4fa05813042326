"""
acRL judgments φ ⊢ (M, N) : ψ and their semantic check.

A judgment holds when φ ⊆ ψ[M/u][N/d]: for every related environment pair
the two denotations are related by ψ. ``judge_semantic`` enumerates φ,
interprets both terms and tests ψ, deciding lifted postconditions through
divergence evaluation.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import islice
from typing import Any, Literal

from divlog.acrl.assertions import (
    RESULT_LEFT,
    RESULT_RIGHT,
    Assertion,
    Env,
    basic_assertion,
    lifted,
)
from divlog.core.domains import Grade
from divlog.core.search import SearchBudget
from divlog.core.values import ExtendedValue
from divlog.divergences.base import DivergenceSpec
from divlog.encoding import encode
from divlog.errors import NonEnumerable, PreconditionFailed, TermTypeError, Undecidable
from divlog.metalang.interpret import interpret
from divlog.metalang.signature import Signature
from divlog.metalang.syntax import EffectOp, Term, Var, format_term
from divlog.metalang.typecheck import typecheck
from divlog.metalang.types import MonadicType, TypeExpr
from divlog.monads.base import Monad

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Judgment:
    """φ ⊢ (M, N) : ψ with M over φ's left context and N over its right context."""

    pre: Assertion
    left: Term
    right: Term
    post: Assertion

    @property
    def signature(self) -> Signature:
        return self.pre.signature

    @property
    def grade(self) -> tuple[Grade, ExtendedValue] | None:
        if self.post.lift is None:
            return None
        return self.post.lift.grade, self.post.lift.budget

    def describe(self) -> str:
        return f"{self.pre.name} ⊢ ({format_term(self.left)}, {format_term(self.right)}) : {self.post.name}"

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "pre": self.pre.name,
            "left": format_term(self.left),
            "right": format_term(self.right),
            "post": self.post.name,
        }
        if self.post.lift is not None:
            lift = self.post.lift
            payload["divergence"] = lift.spec.name
            payload["grade"] = lift.spec.grading.format(lift.grade)
            payload["budget"] = encode(lift.budget)
        return payload


def term_types(pre: Assertion, left: Term, right: Term) -> tuple[TypeExpr, TypeExpr]:
    sig = pre.signature
    return typecheck(sig, pre.left, left), typecheck(sig, pre.right, right)


def make_judgment(pre: Assertion, left: Term, right: Term, post: Assertion) -> Judgment:
    """
    Raises:
        TermTypeError: a term does not typecheck in its context, or ψ is not
            an assertion between the two result types.
    """
    t_left, t_right = term_types(pre, left, right)
    expected = (((RESULT_LEFT, t_left),), ((RESULT_RIGHT, t_right),))
    if (post.left, post.right) != expected:
        shown = f"{[(n, str(t)) for n, t in post.left]} / {[(n, str(t)) for n, t in post.right]}"
        raise TermTypeError(f"postcondition {post.name} is over {shown}, expected u:{t_left} / d:{t_right}")
    return Judgment(pre, left, right, post)


# ── Semantic check ────────────────────────────────────────────────────────

JudgmentOutcome = Literal["holds", "fails", "inconclusive"]


@dataclass
class JudgmentVerdict:
    verdict: JudgmentOutcome
    cases: int = 0
    exhaustive: bool = True
    witness: dict[str, Any] | None = None
    lhs: ExtendedValue | None = None
    rhs: ExtendedValue | None = None
    detail: str = ""

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "verdict": self.verdict,
            "cases": self.cases,
            "exhaustive": self.exhaustive,
        }
        if self.witness is not None:
            payload["witness"] = encode(self.witness)
        if self.lhs is not None:
            payload["lhs"] = encode(self.lhs)
            payload["rhs"] = encode(self.rhs)
        if self.detail:
            payload["detail"] = self.detail
        return payload


def check_instance(judgment: Judgment, monad: Monad | None, gamma: Env, delta: Env) -> dict[str, Any] | None:
    """The failure record of one environment pair, or None when ψ relates the two denotations."""
    sig = judgment.signature
    a = interpret(sig, monad, judgment.left, gamma)
    b = interpret(sig, monad, judgment.right, delta)
    if judgment.post.holds({RESULT_LEFT: a}, {RESULT_RIGHT: b}):
        return None
    failure: dict[str, Any] = {"left_env": dict(gamma), "right_env": dict(delta), "left": a, "right": b}
    lift = judgment.post.lift
    if lift is not None:
        carrier = sig.carrier(judgment.post.lift.inner.left[0][1])
        failure["lhs"] = lift.spec.evaluate(lift.grade, carrier, a, b)
        failure["rhs"] = lift.budget
    return failure


def judge_semantic(judgment: Judgment, monad: Monad | None, budget: SearchBudget, jobs: int = 1) -> JudgmentVerdict:
    """
    Check φ ⊆ ψ[M/u][N/d] on every enumerated pair of φ (up to ``max_cases``).

    Returns ``inconclusive`` when φ cannot be enumerated, when ψ has a monadic
    layer over a non-basic relation, or when φ has more than ``max_cases`` pairs
    and none of the checked ones fails.
    """
    try:
        pairs = judgment.pre.pairs()
        chunk = list(islice(pairs, budget.max_cases))
        exhaustive = next(pairs, None) is None
    except NonEnumerable as exc:
        return JudgmentVerdict("inconclusive", detail=str(exc))

    def run(pair: tuple[Env, Env]) -> dict[str, Any] | None:
        return check_instance(judgment, monad, *pair)

    try:
        if jobs > 1 and len(chunk) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                outcomes = list(pool.map(run, chunk))
        else:
            outcomes = []
            for pair in chunk:
                outcomes.append(run(pair))
                if outcomes[-1] is not None:
                    break
    except Undecidable as exc:
        logger.info("Judgment inconclusive: %s", exc)
        return JudgmentVerdict("inconclusive", cases=len(chunk), exhaustive=exhaustive, detail=str(exc))

    for index, failure in enumerate(outcomes):
        if failure is not None:
            verdict = JudgmentVerdict(
                "fails", cases=index + 1, exhaustive=exhaustive,
                witness={k: failure[k] for k in ("left_env", "right_env", "left", "right")},
                lhs=failure.get("lhs"), rhs=failure.get("rhs"),
                detail=f"{judgment.describe()} fails",
            )
            logger.info("Judgment fails at %s / %s", failure["left_env"], failure["right_env"])
            return verdict
    if not exhaustive:
        logger.info("Judgment inconclusive: first %d pairs of %s hold", len(chunk), judgment.pre.name)
        return JudgmentVerdict("inconclusive", cases=len(chunk), exhaustive=False,
                               detail=f"only the first {len(chunk)} pairs of {judgment.pre.name} were checked")
    logger.info("Judgment holds: %s (%d cases, exhaustive=%s)", judgment.describe(), len(chunk), exhaustive)
    return JudgmentVerdict("holds", cases=len(chunk), exhaustive=exhaustive)


# ── Divergence suprema and the effectful axiom ────────────────────────────


def sup_over(spec: DivergenceSpec, grade: Grade, pre: Assertion, left: Term, right: Term,
             monad: Monad | None = None) -> ExtendedValue:
    """
    sup {Δ^m(⟦M⟧γ, ⟦N⟧δ) | (γ, δ) ∈ φ}, exact over the enumerated pairs.

    Raises:
        PreconditionFailed: the result types differ or are not first-order under T.
    """
    t_left, t_right = term_types(pre, left, right)
    if not (isinstance(t_left, MonadicType) and t_left == t_right and t_left.inner.first_order):
        raise PreconditionFailed(f"divergence sup needs equal first-order computations, got {t_left} / {t_right}")
    sig = pre.signature
    carrier = sig.carrier(t_left.inner)
    monad = monad or spec.monad
    values: Iterable[ExtendedValue] = (
        spec.evaluate(grade, carrier, interpret(sig, monad, left, g), interpret(sig, monad, right, d))
        for g, d in pre.pairs()
    )
    return spec.domain.sup(values)


def axiom_effectful(op: str, pre: Assertion, spec: DivergenceSpec, grade: Grade | None = None,
                    monad: Monad | None = None) -> tuple[ExtendedValue, Judgment]:
    """
    φ ⊢ (c(u), c(d)) : ⌈T,Δ⌉(m, v)(E⟦b′⟧) with v the exact sup of Δ^m over φ.

    ``pre`` must relate u:b and d:b for the operation's domain b.

    Raises:
        PreconditionFailed: ``op`` is not an effectful operation, or φ is over other contexts.
    """
    sig = pre.signature
    decl = sig.effect_ops.get(op)
    if decl is None:
        raise PreconditionFailed(f"{op} is not an effectful operation of the signature")
    expected = (((RESULT_LEFT, decl.domain),), ((RESULT_RIGHT, decl.domain),))
    if (pre.left, pre.right) != expected:
        raise PreconditionFailed(f"the precondition of the {op} axiom must relate u:{decl.domain} and d:{decl.domain}")
    grade = spec.grading.unit if grade is None else grade
    left, right = EffectOp(op, Var(RESULT_LEFT)), EffectOp(op, Var(RESULT_RIGHT))
    budget = sup_over(spec, grade, pre, left, right, monad)
    kind = spec.endorelation.kind
    if kind not in ("eq", "top"):
        raise PreconditionFailed(f"{spec.name} is relative to a custom endorelation")
    post = lifted(spec, grade, budget, basic_assertion(sig, kind, decl.codomain))
    logger.info("Axiom %s over %s: v=%s", op, pre.name, budget)
    return budget, Judgment(pre, left, right, post)
