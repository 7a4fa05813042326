"""
Derivation checking for acRL.

A derivation script is an ordered list of rule applications. Each step names
its rule, its premises (ids of earlier steps) and the data the rule needs;
the checker recomputes every conclusion and every grade from the premises and
never trusts a grade written in the script. Claimed grades are compared with
the recomputed ones.

Rules::

    axiom                 φ ⊢ (c(u), c(d)) : ⌈T,Δ⌉(m, sup_φ Δ^m)(E⟦b′⟧)
    semantic              φ ⊢ (M, N) : ⌈T,Δ⌉(m, sup_φ Δ^m)(ψ), ψ basic
    transport             φ ⊢ (M, N) : ⌈T,Δ⌉(1, 0)(ψ) when ⟦N⟧δ = T h ⟦M⟧γ with graph(h) ⊆ ψ
    pure                  φ ⊢ (M, N) : ψ checked on every pair of φ
    return                φ ⊢ (M, N) : ψ  ⇒  φ ⊢ (ret M, ret N) : ⌈T,Δ⌉(1, 0)ψ
    bind                  φ ⊢ (M, N) : ⌈T,Δ⌉(m, v)ψ  and  φ, ψ[x/u; x′/d] ⊢ (M′, N′) : ⌈T,Δ⌉(n, w)ρ
                          ⇒  φ ⊢ (let x = M in M′, let x′ = N in N′) : ⌈T,Δ⌉(m·n, v + w)ρ
    consequence           φ′ ⊆ φ and ψ ⊆ ψ′ (φ′ may live in larger contexts)
    weaken                m ≤ n, v ≤ w, ψ ⊆ ψ′
    semantic-equivalence  ⟦M⟧ = ⟦M′⟧ and ⟦N⟧ = ⟦N′⟧
    instantiate           φ[θ; θ′] ⊢ (M[θ], N[θ′]) : ψ
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Literal, get_args

from divlog.acrl.assertions import (
    RESULT_LEFT,
    RESULT_RIGHT,
    Assertion,
    AssertionBuilder,
    Ctx,
    includes,
    lifted,
    result_ctx,
)
from divlog.acrl.judgments import (
    Judgment,
    JudgmentVerdict,
    axiom_effectful,
    check_instance,
    judge_semantic,
    make_judgment,
    sup_over,
    term_types,
)
from divlog.core.domains import Grade
from divlog.core.search import SearchBudget
from divlog.core.values import format_value, parse_value
from divlog.divergences.base import DivergenceSpec
from divlog.encoding import encode
from divlog.errors import (
    InvalidStep,
    NonEnumerable,
    PreconditionFailed,
    TermTypeError,
    Undecidable,
    UnsupportedEffect,
)
from divlog.metalang.interpret import interpret, semantically_equal
from divlog.metalang.parser import Program, TermParser, parse_type, read_one
from divlog.metalang.syntax import Let, Ret, Term, substitute
from divlog.metalang.types import MonadicType
from divlog.monads.base import Monad

logger = logging.getLogger(__name__)

Rule = Literal[
    "axiom", "semantic", "transport", "pure", "return", "bind",
    "consequence", "weaken", "semantic-equivalence", "instantiate",
]
RULES: tuple[str, ...] = get_args(Rule)


@dataclass(frozen=True)
class Step:
    """One rule application, with its data still in concrete syntax."""

    id: str
    rule: Rule
    premises: tuple[str, ...] = ()
    left_context: tuple[tuple[str, str], ...] | None = None
    right_context: tuple[tuple[str, str], ...] | None = None
    pre: str | None = None
    post: str | None = None
    left: str | None = None
    right: str | None = None
    op: str | None = None
    grade: str | None = None
    budget: str | None = None
    var_left: str | None = None
    var_right: str | None = None
    theta_left: Mapping[str, str] = field(default_factory=dict)
    theta_right: Mapping[str, str] = field(default_factory=dict)


@dataclass
class DerivationScript:
    program: Program
    monad: Monad
    spec: DivergenceSpec
    steps: list[Step]
    name: str = ""


@dataclass
class DerivationReport:
    verdict: Literal["valid", "invalid"]
    conclusions: dict[str, Judgment] = field(default_factory=dict)
    failed_index: int | None = None
    failed_step: str | None = None
    reason: str = ""
    witness: dict[str, Any] | None = None
    cross_check: JudgmentVerdict | None = None

    @property
    def valid(self) -> bool:
        return self.verdict == "valid"

    @property
    def conclusion(self) -> Judgment | None:
        if not self.conclusions or not self.valid:
            return None
        return list(self.conclusions.values())[-1]

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "verdict": self.verdict,
            "steps": {sid: j.to_dict() for sid, j in self.conclusions.items()},
        }
        if self.conclusion is not None:
            payload["conclusion"] = self.conclusion.to_dict()
        if not self.valid:
            payload["invalid_step"] = {"index": self.failed_index, "id": self.failed_step, "reason": self.reason}
            if self.witness:
                payload["invalid_step"]["witness"] = encode(self.witness)
        if self.cross_check is not None:
            payload["cross_check"] = self.cross_check.to_dict()
        return payload


# ── Checker ───────────────────────────────────────────────────────────────


class Deriver:
    """Replays a script, one rule at a time."""

    def __init__(self, script: DerivationScript, budget: SearchBudget):
        self.script = script
        self.budget = budget
        self.program = script.program
        self.sig = script.program.signature
        self.spec = script.spec
        self.monad = script.monad
        self.builder = AssertionBuilder(self.sig, self.spec, self.monad, resolve=self.program.resolve)
        self.proved: dict[str, Judgment] = {}
        self.rules: dict[str, Callable[[Step], Judgment]] = {
            "axiom": self._axiom,
            "semantic": self._semantic,
            "transport": self._transport,
            "pure": self._pure,
            "return": self._return,
            "bind": self._bind,
            "consequence": self._consequence,
            "weaken": self._weaken,
            "semantic-equivalence": self._semantic_equivalence,
            "instantiate": self._instantiate,
        }

    # ── Parsing helpers ──

    def term(self, text: str | None, what: str) -> Term:
        if text is None:
            raise InvalidStep(f"missing {what} term")
        return self.program.resolve(TermParser(self.sig).parse(read_one(text)))

    def ctx(self, raw: Sequence[tuple[str, str]] | None, default: Ctx = ()) -> Ctx:
        if raw is None:
            return default
        return tuple((name, parse_type(t)) for name, t in raw)

    def grade(self, text: str | None) -> Grade:
        return self.spec.grading.parse(text)

    def premise(self, step: Step, count: int) -> list[Judgment]:
        if len(step.premises) != count:
            raise InvalidStep(f"{step.rule} takes {count} premise(s), got {len(step.premises)}")
        missing = [p for p in step.premises if p not in self.proved]
        if missing:
            raise InvalidStep(f"premise(s) {', '.join(missing)} are not earlier steps")
        return [self.proved[p] for p in step.premises]

    def pre_and_terms(self, step: Step) -> tuple[Assertion, Term, Term]:
        left_ctx, right_ctx = self.ctx(step.left_context), self.ctx(step.right_context)
        pre = self.builder.build(step.pre or "(true)", left_ctx, right_ctx)
        return pre, self.term(step.left, "left"), self.term(step.right, "right")

    def result_post(self, step: Step, pre: Assertion, left: Term, right: Term,
                    inner: bool) -> Assertion:
        """ψ over the result types (under T when ``inner``)."""
        t_left, t_right = term_types(pre, left, right)
        if inner:
            if not (isinstance(t_left, MonadicType) and isinstance(t_right, MonadicType)):
                raise InvalidStep(f"{step.rule} relates two computations, got {t_left} / {t_right}")
            t_left, t_right = t_left.inner, t_right.inner
        return self.builder.build(step.post or "(true)", result_ctx(RESULT_LEFT, t_left),
                                  result_ctx(RESULT_RIGHT, t_right))

    def lift(self, judgment: Judgment, step: Step) -> Assertion:
        post = judgment.post
        if post.lift is None:
            raise InvalidStep(f"{step.rule} needs a premise with a lifted postcondition, got {post.name}")
        if post.lift.spec.name != self.spec.name:
            raise InvalidStep(f"premise is about {post.lift.spec.name}, the script about {self.spec.name}")
        return post

    # ── Rules ──

    def _axiom(self, step: Step) -> Judgment:
        if step.op is None or step.op not in self.sig.effect_ops:
            raise InvalidStep(f"axiom needs an effectful operation, got {step.op!r}")
        domain = self.sig.effect_ops[step.op].domain
        left_ctx = self.ctx(step.left_context, result_ctx(RESULT_LEFT, domain))
        right_ctx = self.ctx(step.right_context, result_ctx(RESULT_RIGHT, domain))
        pre = self.builder.build(step.pre or "(true)", left_ctx, right_ctx)
        _, judgment = axiom_effectful(step.op, pre, self.spec, self.grade(step.grade), self.monad)
        return judgment

    def _semantic(self, step: Step) -> Judgment:
        pre, left, right = self.pre_and_terms(step)
        post = self.result_post(step, pre, left, right, inner=True)
        t = post.left[0][1]
        one_point = t.first_order and len(self.sig.carrier(t)) == 1
        if not one_point and post.basic != self.spec.endorelation.kind:
            raise InvalidStep(f"semantic needs the basic relation {self.spec.endorelation.name}, got {post.name}")
        grade = self.grade(step.grade)
        budget = sup_over(self.spec, grade, pre, left, right, self.monad)
        return make_judgment(pre, left, right, lifted(self.spec, grade, budget, post))

    def _transport(self, step: Step) -> Judgment:
        if self.spec.endorelation.kind != "eq":
            raise InvalidStep(f"transport needs an Eq-relative divergence, {self.spec.name} is not")
        pre, left, right = self.pre_and_terms(step)
        post = self.result_post(step, pre, left, right, inner=True)
        carrier = self.sig.carrier(post.left[0][1]) if post.left[0][1].first_order else None
        unit = self.spec.grading.unit
        for gamma, delta in pre.pairs():
            a = interpret(self.sig, self.monad, left, gamma)
            b = interpret(self.sig, self.monad, right, delta)
            if not self.spec.domain.leq(self.spec.evaluate(unit, carrier, a, a), self.spec.domain.zero):
                raise InvalidStep(f"{self.spec.name} is not reflexive on {a!r}")
            if transport_map(self.monad, a, b, post, self.budget.max_cases) is None:
                raise InvalidStep("no map with graph inside the postcondition carries the left "
                                  "computation onto the right one",
                                  {"left_env": gamma, "right_env": delta, "left": a, "right": b})
        return make_judgment(pre, left, right, lifted(self.spec, unit, self.spec.domain.zero, post))

    def _pure(self, step: Step) -> Judgment:
        pre, left, right = self.pre_and_terms(step)
        post = self.result_post(step, pre, left, right, inner=False)
        judgment = make_judgment(pre, left, right, post)
        verdict = judge_semantic(judgment, self.monad, self.budget)
        if not verdict.holds:
            raise InvalidStep(f"pure judgment {verdict.verdict}: {verdict.detail}", verdict.witness)
        return judgment

    def _return(self, step: Step) -> Judgment:
        (p,) = self.premise(step, 1)
        post = lifted(self.spec, self.spec.grading.unit, self.spec.domain.zero, p.post)
        return make_judgment(p.pre, Ret(p.left), Ret(p.right), post)

    def _bind(self, step: Step) -> Judgment:
        first, second = self.premise(step, 2)
        p1, p2 = self.lift(first, step).lift, self.lift(second, step).lift
        x, x2 = step.var_left, step.var_right
        if not x or not x2:
            raise InvalidStep("bind needs the two bound variable names")
        gamma_vars, delta_vars = first.pre.variables
        if x in gamma_vars or x2 in delta_vars:
            raise InvalidStep(f"bound variables {x}/{x2} clash with the precondition's context")
        psi = p1.inner
        (u, t), (d, t2) = psi.left[0], psi.right[0]
        ext_left, ext_right = first.pre.left + ((x, t),), first.pre.right + ((x2, t2),)
        try:
            second_pre = second.pre.extended(ext_left, ext_right)
        except PreconditionFailed as exc:
            raise InvalidStep(f"second premise is not over the extended contexts: {exc}") from exc
        values_left, values_right = self.sig.carrier(t).elements, self.sig.carrier(t2).elements
        for gamma, delta in first.pre.pairs():
            for a, b in itertools.product(values_left, values_right):
                if psi.holds({u: a}, {d: b}) and not second_pre.holds({**gamma, x: a}, {**delta, x2: b}):
                    raise InvalidStep(
                        f"side condition {first.pre.name} ∧ {psi.name}[{x}/{u}; {x2}/{d}] ⊆ "
                        f"{second.pre.name} fails",
                        {"left_env": {**gamma, x: a}, "right_env": {**delta, x2: b}},
                    )
            self._check_reached(first, second, second_pre, (x, x2), gamma, delta)
        grade = self.spec.grading.mul(p1.grade, p2.grade)
        budget = self.spec.domain.add(p1.budget, p2.budget)
        post = lifted(self.spec, grade, budget, p2.inner)
        return make_judgment(first.pre, Let(x, first.left, second.left), Let(x2, first.right, second.right), post)

    def _reached(self, term: Term, env: Mapping[str, Any]) -> list[Any]:
        value = interpret(self.sig, self.monad, term, env)
        try:
            outcomes = self.monad.support(value)
        except UnsupportedEffect:
            return []
        return list(dict.fromkeys(self.monad.outcome_value(o) for o in outcomes))

    def _check_reached(self, first: Judgment, second: Judgment, second_pre: Assertion, names: tuple[str, str],
                       gamma: Mapping[str, Any], delta: Mapping[str, Any]) -> None:
        """
        Judge the continuation directly wherever the first computations reach
        values outside the declared carriers.

        The second premise was only established on carrier values, so it says
        nothing about outcomes such as noise pushed past the window of R.
        """
        psi = first.post.lift.inner
        (u, t), (d, t2) = psi.left[0], psi.right[0]
        inside_left, inside_right = set(self.sig.carrier(t).elements), set(self.sig.carrier(t2).elements)
        x, x2 = names
        for a, b in itertools.product(self._reached(first.left, gamma), self._reached(first.right, delta)):
            if (a in inside_left and b in inside_right) or not psi.holds({u: a}, {d: b}):
                continue
            env_left, env_right = {**gamma, x: a}, {**delta, x2: b}
            if not second_pre.holds(env_left, env_right):
                raise InvalidStep(
                    f"side condition {first.pre.name} ∧ {psi.name}[{x}/{u}; {x2}/{d}] ⊆ "
                    f"{second.pre.name} fails at a reached value",
                    {"left_env": env_left, "right_env": env_right},
                )
            failure = check_instance(second, self.monad, env_left, env_right)
            if failure is not None:
                raise InvalidStep(
                    f"{second.describe()} fails at {x}={a!r}, {x2}={b!r}, "
                    f"reached outside the carrier its premise was checked on",
                    failure,
                )

    def _consequence(self, step: Step) -> Judgment:
        (p,) = self.premise(step, 1)
        pre = p.pre
        if step.pre is not None or step.left_context is not None or step.right_context is not None:
            left_ctx = self.ctx(step.left_context, p.pre.left)
            right_ctx = self.ctx(step.right_context, p.pre.right)
            pre = self.builder.build(step.pre or "(true)", left_ctx, right_ctx)
            try:
                widened = p.pre.extended(left_ctx, right_ctx)
            except PreconditionFailed as exc:
                raise InvalidStep(str(exc)) from exc
            ok, witness = includes(widened, pre)
            if not ok:
                raise InvalidStep(f"{pre.name} ⊈ {p.pre.name}", _pair_witness(witness))
        post = p.post
        if step.post is not None:
            post = self.builder.build(step.post, p.post.left, p.post.right)
            ok, witness = includes(post, p.post)
            if not ok:
                raise InvalidStep(f"{p.post.name} ⊈ {post.name}", _pair_witness(witness))
        return make_judgment(pre, p.left, p.right, post)

    def _weaken(self, step: Step) -> Judgment:
        (p,) = self.premise(step, 1)
        layer = self.lift(p, step).lift
        grade = layer.grade if step.grade is None else self.grade(step.grade)
        budget = layer.budget if step.budget is None else parse_value(step.budget)
        if not self.spec.grading.leq(layer.grade, grade):
            raise InvalidStep(f"grade {self.spec.grading.format(grade)} is below "
                              f"{self.spec.grading.format(layer.grade)}")
        if not self.spec.domain.leq(layer.budget, budget):
            raise InvalidStep(f"budget {format_value(budget)} is below {format_value(layer.budget)}")
        inner = layer.inner
        if step.post is not None:
            inner = self.builder.build(step.post, layer.inner.left, layer.inner.right)
            ok, witness = includes(inner, layer.inner)
            if not ok:
                raise InvalidStep(f"{layer.inner.name} ⊈ {inner.name}", _pair_witness(witness))
        return make_judgment(p.pre, p.left, p.right, lifted(self.spec, grade, budget, inner))

    def _semantic_equivalence(self, step: Step) -> Judgment:
        (p,) = self.premise(step, 1)
        left = p.left if step.left is None else self.term(step.left, "left")
        right = p.right if step.right is None else self.term(step.right, "right")
        old = term_types(p.pre, p.left, p.right)
        new = term_types(p.pre, left, right)
        if old != new:
            raise InvalidStep(f"replacement terms have types {new[0]} / {new[1]}, expected {old[0]} / {old[1]}")
        for ctx, before, after, side in ((p.pre.left, p.left, left, "left"), (p.pre.right, p.right, right, "right")):
            if before == after:
                continue
            env = semantically_equal(self.sig, self.monad, ctx, before, after)
            if env is not None:
                raise InvalidStep(f"{side} terms differ semantically", {"env": env})
        return Judgment(p.pre, left, right, p.post)

    def _instantiate(self, step: Step) -> Judgment:
        (p,) = self.premise(step, 1)
        left_ctx, right_ctx = self.ctx(step.left_context), self.ctx(step.right_context)
        theta_left = {x: self.term(t, f"substitution for {x}") for x, t in step.theta_left.items()}
        theta_right = {x: self.term(t, f"substitution for {x}") for x, t in step.theta_right.items()}
        pre = p.pre.pullback(theta_left, theta_right, left_ctx, right_ctx)
        return make_judgment(pre, substitute(p.left, theta_left), substitute(p.right, theta_right), p.post)

    # ── Driver ──

    def check_claim(self, step: Step, judgment: Judgment) -> None:
        if step.rule == "weaken" or (step.grade is None and step.budget is None):
            return
        layer = judgment.post.lift
        if layer is None:
            raise InvalidStep(f"step claims a grade but concludes {judgment.post.name}")
        if step.grade is not None and self.grade(step.grade) != layer.grade:
            raise InvalidStep(f"claimed grade {step.grade}, the rule gives {self.spec.grading.format(layer.grade)}")
        if step.budget is not None:
            claimed = parse_value(step.budget)
            if not (self.spec.domain.leq(claimed, layer.budget) and self.spec.domain.leq(layer.budget, claimed)):
                raise InvalidStep(f"claimed budget {step.budget}, the rule gives {format_value(layer.budget)}")

    def apply(self, step: Step) -> Judgment:
        if step.rule not in self.rules:
            raise InvalidStep(f"unknown rule {step.rule!r}")
        if step.id in self.proved:
            raise InvalidStep(f"step id {step.id} is used twice")
        judgment = self.rules[step.rule](step)
        self.check_claim(step, judgment)
        self.proved[step.id] = judgment
        logger.debug("Step %s (%s): %s", step.id, step.rule, judgment.describe())
        return judgment


def _pair_witness(pair: tuple[dict, dict] | None) -> dict[str, Any] | None:
    if pair is None:
        return None
    return {"left_env": pair[0], "right_env": pair[1]}


def transport_map(monad: Monad, a: Any, b: Any, relation: Assertion, limit: int) -> dict | None:
    """A map h with graph inside ``relation`` such that T h a = b, keeping costs."""
    sources = list(dict.fromkeys(monad.outcome_value(o) for o in monad.support(a)))
    targets = list(dict.fromkeys(monad.outcome_value(o) for o in monad.support(b)))
    (u, _), (d, _) = relation.left[0], relation.right[0]
    candidates = [[y for y in targets if relation.holds({u: x}, {d: y})] for x in sources]
    if any(not options for options in candidates):
        return None
    for choice in itertools.islice(itertools.product(*candidates), limit):
        mapping = dict(zip(sources, choice, strict=True))
        if monad.equal(monad.relabel(a, mapping.__getitem__), b):
            return mapping
    return None


def derive(script: DerivationScript, budget: SearchBudget, verify: bool = False) -> DerivationReport:
    """
    Re-check every step of ``script``.

    With ``verify`` the final conclusion is also judged semantically.
    """
    deriver = Deriver(script, budget)
    for index, step in enumerate(script.steps):
        try:
            deriver.apply(step)
        except InvalidStep as exc:
            return _invalid(deriver, index, step, str(exc), exc.witness)
        except (TermTypeError, PreconditionFailed, NonEnumerable, Undecidable) as exc:
            return _invalid(deriver, index, step, f"{type(exc).__name__}: {exc}", None)
    report = DerivationReport("valid", conclusions=dict(deriver.proved))
    if report.conclusion is not None:
        logger.info("Derivation %s valid: %s", script.name or "-", report.conclusion.describe())
        if verify:
            report.cross_check = judge_semantic(report.conclusion, script.monad, budget)
    return report


def _invalid(deriver: Deriver, index: int, step: Step, reason: str, witness: dict | None) -> DerivationReport:
    logger.info("Derivation invalid at step %d (%s, %s): %s", index, step.id, step.rule, reason)
    return DerivationReport("invalid", conclusions=dict(deriver.proved), failed_index=index,
                            failed_step=step.id, reason=reason, witness=witness or None)


__all__ = [
    "RULES",
    "DerivationReport",
    "DerivationScript",
    "Deriver",
    "Step",
    "derive",
    "transport_map",
]
