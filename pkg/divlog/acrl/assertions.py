"""
Relational assertions between two typing contexts.

An assertion φ between Γ and Δ is a set of environment pairs (γ, δ), given by
a membership test. Assertions over first-order contexts are enumerable (by
filtering the product of the signature's carriers); assertions with a
monadic layer are membership-only. A lifted assertion ⌈T,Δ⌉(m, v)ψ is decided
through the fundamental property: when ψ is the divergence's own basic
endorelation (or lives on a one-point carrier) membership is Δ^m ≤ v;
otherwise it is ``Undecidable``.

S-expression syntax (terms inside atoms are pure; M over Γ, N over Δ)::

    (true) (false) (eq M N) (diff r M N) (succ r M N)
    (and A …) (or A …) (not A) (implies A B)
    (exists-left x τ A) (forall-left x τ A) (exists-right x τ A) (forall-right x τ A)
    (lift m v A)     A between u:τ and d:σ, outer contexts u:T τ and d:T σ
    (arrow A B)      A on arguments, B on results, outer contexts of function type
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass, field, replace
from typing import Any, Literal

from divlog.core.domains import Grade
from divlog.core.values import ExtendedValue, format_value, parse_value
from divlog.divergences.base import DivergenceSpec
from divlog.errors import (
    NonEnumerable,
    ParseError,
    PreconditionFailed,
    TermTypeError,
    Undecidable,
)
from divlog.metalang.interpret import apply_value, interpret
from divlog.metalang.parser import Atom, SExpr, SList, TermParser, read_one, type_from_sexpr
from divlog.metalang.signature import Signature
from divlog.metalang.syntax import Term, Var, format_term
from divlog.metalang.typecheck import typecheck
from divlog.metalang.types import ArrowType, MonadicType, TypeExpr
from divlog.monads.base import Monad

logger = logging.getLogger(__name__)

Env = Mapping[str, Any]
Ctx = tuple[tuple[str, TypeExpr], ...]
Membership = Callable[[Env, Env], bool]

RESULT_LEFT = "u"
RESULT_RIGHT = "d"


def as_ctx(context: Iterable[tuple[str, TypeExpr]] | Mapping[str, TypeExpr]) -> Ctx:
    items = context.items() if isinstance(context, Mapping) else context
    return tuple((name, t) for name, t in items)


def result_ctx(var: str, t: TypeExpr) -> Ctx:
    return ((var, t),)


@dataclass(frozen=True)
class Lift:
    """The monadic layer of ⌈T,Δ⌉(m, v)ψ."""

    spec: DivergenceSpec
    grade: Grade
    budget: ExtendedValue
    inner: Assertion

    def describe(self) -> str:
        return f"({self.spec.grading.format(self.grade)}, {format_value(self.budget)})"


@dataclass(frozen=True, eq=False)
class Assertion:
    """A relation between the environments of ``left`` and ``right``."""

    left: Ctx
    right: Ctx
    member: Membership = field(repr=False)
    signature: Signature = field(repr=False)
    name: str = "φ"
    basic: Literal["eq", "top"] | None = None
    lift: Lift | None = None

    def holds(self, gamma: Env, delta: Env) -> bool:
        return bool(self.member(gamma, delta))

    def __contains__(self, pair: object) -> bool:
        gamma, delta = pair  # type: ignore[misc]
        return self.holds(gamma, delta)

    def __str__(self) -> str:
        return self.name

    @property
    def variables(self) -> tuple[frozenset[str], frozenset[str]]:
        return frozenset(n for n, _ in self.left), frozenset(n for n, _ in self.right)

    @property
    def enumerable(self) -> bool:
        return all(t.first_order for _, t in self.left + self.right)

    def pairs(self) -> Iterator[tuple[dict[str, Any], dict[str, Any]]]:
        """
        Every related environment pair, in carrier order.

        Raises:
            NonEnumerable: a context type is higher-order or monadic.
        """
        if not self.enumerable:
            raise NonEnumerable(f"assertion {self.name} ranges over a monadic or function type")
        lefts = self.signature.environments(self.left)
        rights = self.signature.environments(self.right)
        for gamma in lefts:
            for delta in rights:
                if self.holds(gamma, delta):
                    yield gamma, delta

    # ── Boolean algebra ──

    def _same_shape(self, other: Assertion) -> None:
        if self.left != other.left or self.right != other.right:
            raise PreconditionFailed(
                f"assertions {self.name} and {other.name} live between different contexts"
            )

    def meet(self, other: Assertion) -> Assertion:
        self._same_shape(other)
        return replace(self, member=lambda g, d: self.holds(g, d) and other.holds(g, d),
                       name=f"({self.name} ∧ {other.name})", basic=None, lift=None)

    def join(self, other: Assertion) -> Assertion:
        self._same_shape(other)
        return replace(self, member=lambda g, d: self.holds(g, d) or other.holds(g, d),
                       name=f"({self.name} ∨ {other.name})", basic=None, lift=None)

    def complement(self) -> Assertion:
        return replace(self, member=lambda g, d: not self.holds(g, d),
                       name=f"¬{self.name}", basic=None, lift=None)

    def implies(self, other: Assertion) -> Assertion:
        return self.complement().join(other)

    # ── Quantifiers ──

    def _split(self, var: str, side: Literal["left", "right"]) -> tuple[Ctx, TypeExpr]:
        ctx = self.left if side == "left" else self.right
        types = dict(ctx)
        if var not in types:
            raise PreconditionFailed(f"{var} is not a {side} variable of {self.name}")
        return tuple((n, t) for n, t in ctx if n != var), types[var]

    def _quantify(self, var: str, side: Literal["left", "right"], universal: bool) -> Assertion:
        remaining, t = self._split(var, side)
        values = self.signature.carrier(t).elements
        test = all if universal else any

        def member(gamma: Env, delta: Env) -> bool:
            if side == "left":
                return test(self.holds({**gamma, var: a}, delta) for a in values)
            return test(self.holds(gamma, {**delta, var: a}) for a in values)

        symbol = "∀" if universal else "∃"
        name = f"{symbol}{var}{'ₗ' if side == 'left' else 'ᵣ'}.{self.name}"
        if side == "left":
            return replace(self, left=remaining, member=member, name=name, basic=None, lift=None)
        return replace(self, right=remaining, member=member, name=name, basic=None, lift=None)

    def exists_left(self, var: str) -> Assertion:
        return self._quantify(var, "left", universal=False)

    def exists_right(self, var: str) -> Assertion:
        return self._quantify(var, "right", universal=False)

    def forall_left(self, var: str) -> Assertion:
        return self._quantify(var, "left", universal=True)

    def forall_right(self, var: str) -> Assertion:
        return self._quantify(var, "right", universal=True)

    # ── Context changes ──

    def pullback(self, theta_left: Mapping[str, Term], theta_right: Mapping[str, Term],
                 left: Iterable[tuple[str, TypeExpr]], right: Iterable[tuple[str, TypeExpr]]) -> Assertion:
        """
        φ[θ; θ′] between the new contexts: (γ, δ) ↦ (⟦θ⟧γ, ⟦θ′⟧δ) ∈ φ.

        Variables of φ's contexts that θ does not mention map to themselves.

        Raises:
            TermTypeError: θ does not typecheck against φ's contexts.
        """
        left, right = as_ctx(left), as_ctx(right)
        sig = self.signature
        full_left = _complete(self.left, theta_left, left, sig)
        full_right = _complete(self.right, theta_right, right, sig)

        def member(gamma: Env, delta: Env) -> bool:
            g = {x: interpret(sig, None, m, gamma) for x, m in full_left.items()}
            d = {x: interpret(sig, None, m, delta) for x, m in full_right.items()}
            return self.holds(g, d)

        shown = ", ".join(f"{format_term(m)}/{x}" for x, m in {**theta_left, **theta_right}.items())
        return Assertion(left, right, member, sig, f"{self.name}[{shown}]")

    def extended(self, left: Iterable[tuple[str, TypeExpr]], right: Iterable[tuple[str, TypeExpr]]) -> Assertion:
        """The same relation read in larger contexts (extra variables are ignored)."""
        left, right = as_ctx(left), as_ctx(right)
        for mine, theirs, side in ((self.left, left, "left"), (self.right, right, "right")):
            types = dict(theirs)
            for name, t in mine:
                if types.get(name) != t:
                    raise PreconditionFailed(f"{side} context of {self.name} does not extend to include {name}:{t}")
        if left == self.left and right == self.right:
            return self
        return replace(self, left=left, right=right, basic=None)


def _complete(ctx: Ctx, theta: Mapping[str, Term], new_ctx: Ctx, sig: Signature) -> dict[str, Term]:
    full: dict[str, Term] = {}
    for name, t in ctx:
        term = theta.get(name, Var(name))
        actual = typecheck(sig, new_ctx, term)
        if actual != t:
            raise TermTypeError(f"substitution for {name} has type {actual}, expected {t}", term.loc)
        full[name] = term
    return full


# ── Constructors ──────────────────────────────────────────────────────────


def top(signature: Signature, left: Iterable[tuple[str, TypeExpr]], right: Iterable[tuple[str, TypeExpr]]) -> Assertion:
    left, right = as_ctx(left), as_ctx(right)
    basic = "top" if len(left) == len(right) == 1 else None
    return Assertion(left, right, lambda g, d: True, signature, "⊤", basic=basic)


def bottom(signature: Signature, left: Iterable[tuple[str, TypeExpr]], right: Iterable[tuple[str, TypeExpr]]) -> Assertion:
    return Assertion(as_ctx(left), as_ctx(right), lambda g, d: False, signature, "⊥")


def equality(signature: Signature, t: TypeExpr, left_var: str = RESULT_LEFT,
             right_var: str = RESULT_RIGHT) -> Assertion:
    """Eq τ between u:τ and d:τ."""
    return Assertion(result_ctx(left_var, t), result_ctx(right_var, t),
                     lambda g, d: g[left_var] == d[right_var], signature, f"Eq⟦{t}⟧", basic="eq")


def basic_assertion(signature: Signature, kind: Literal["eq", "top"], t: TypeExpr) -> Assertion:
    if kind == "eq":
        return equality(signature, t)
    return top(signature, result_ctx(RESULT_LEFT, t), result_ctx(RESULT_RIGHT, t))


def lifted(spec: DivergenceSpec, grade: Grade, budget: ExtendedValue, inner: Assertion) -> Assertion:
    """
    ⌈T,Δ⌉(m, v)ψ between u:T τ and d:T σ.

    Raises:
        PreconditionFailed: ψ is not an assertion between two single result variables.
    """
    if len(inner.left) != 1 or len(inner.right) != 1:
        raise PreconditionFailed(f"{inner.name} must relate one left and one right variable")
    (u, t_left), (d, t_right) = inner.left[0], inner.right[0]
    spec.grading.require(grade)
    sig = inner.signature
    carrier = None
    if t_left.first_order:
        carrier = sig.carrier(t_left)
    one_point = carrier is not None and len(carrier) == 1 and t_left == t_right
    if one_point:
        point = carrier.elements[0]
        decidable = inner.holds({u: point}, {d: point})
        reason = f"{inner.name} is empty on the one-point carrier"
    else:
        decidable = inner.basic is not None and inner.basic == spec.endorelation.kind and carrier is not None
        reason = (f"{inner.name} is not the basic endorelation {spec.endorelation.name} "
                  f"of {spec.name}")

    def member(gamma: Env, delta: Env) -> bool:
        if not decidable:
            raise Undecidable(f"membership in the lifting of {inner.name}: {reason}")
        value = spec.evaluate(grade, carrier, gamma[u], delta[d])
        return spec.domain.leq(value, budget)

    layer = Lift(spec, grade, budget, inner)
    return Assertion(result_ctx(u, MonadicType(t_left)), result_ctx(d, MonadicType(t_right)),
                     member, sig, f"⌈{spec.name}⌉{layer.describe()}{inner.name}", lift=layer)


def exponential(phi: Assertion, psi: Assertion, monad: Monad | None = None) -> Assertion:
    """
    φ ⇒ ψ between function types: (f, g) related iff (f x, g y) ∈ ψ for all (x, y) ∈ φ.
    """
    (u, a), (d, b) = phi.left[0], phi.right[0]
    (u2, a2), (d2, b2) = psi.left[0], psi.right[0]
    sig = phi.signature
    pairs = list(phi.pairs())

    def member(gamma: Env, delta: Env) -> bool:
        f, g = gamma[u2], delta[d2]
        return all(psi.holds({u2: apply_value(sig, monad, f, x[u])}, {d2: apply_value(sig, monad, g, y[d])})
                   for x, y in pairs)

    return Assertion(result_ctx(u2, ArrowType(a, a2)), result_ctx(d2, ArrowType(b, b2)),
                     member, sig, f"({phi.name} ⇒ {psi.name})")


# ── S-expression builder ──────────────────────────────────────────────────


@dataclass
class AssertionBuilder:
    """Turns assertion s-expressions into Assertions over a signature."""

    signature: Signature
    spec: DivergenceSpec | None = None
    monad: Monad | None = None
    resolve: Callable[[Term], Term] = field(default=lambda t: t)

    def build(self, expr: str | SExpr, left: Iterable[tuple[str, TypeExpr]],
              right: Iterable[tuple[str, TypeExpr]]) -> Assertion:
        node = read_one(expr) if isinstance(expr, str) else expr
        return self._build(node, as_ctx(left), as_ctx(right))

    def _term(self, node: SExpr, ctx: Ctx) -> tuple[Term, TypeExpr]:
        term = self.resolve(TermParser(self.signature).parse(node))
        t = typecheck(self.signature, ctx, term)
        if not t.first_order:
            raise TermTypeError(f"assertion terms must be first-order values, got {t}", node.loc)
        return term, t

    def _grade(self, node: SExpr) -> Grade:
        if self.spec is None:
            raise ParseError("a lifted assertion needs a divergence", node.loc)
        if isinstance(node, SList):
            # (ln 2) for ε = ln 2
            parts = [item.text for item in node.items if isinstance(item, Atom)]
            return self.spec.grading.parse(f"{parts[0]}({parts[1]})" if len(parts) == 2 else "")
        return self.spec.grading.parse(node.text)

    def _build(self, node: SExpr, left: Ctx, right: Ctx) -> Assertion:
        if isinstance(node, Atom) or not node.items or not isinstance(node.items[0], Atom):
            raise ParseError("an assertion is a list headed by a connective", node.loc)
        head, args = node.items[0].text, node.items[1:]
        sig = self.signature

        def arity(n: int) -> None:
            if len(args) != n:
                raise ParseError(f"{head} takes {n} argument(s), got {len(args)}", node.loc)

        if head == "true":
            arity(0)
            return top(sig, left, right)
        if head == "false":
            arity(0)
            return bottom(sig, left, right)
        if head in ("eq", "diff", "succ"):
            arity(2 if head == "eq" else 3)
            radius = None
            if head != "eq":
                radius = parse_value(args[0].text) if isinstance(args[0], Atom) else None
                if radius is None:
                    raise ParseError(f"{head} needs a numeric radius", args[0].loc)
                args = args[1:]
            m, t_left = self._term(args[0], left)
            n, t_right = self._term(args[1], right)
            if t_left != t_right:
                raise TermTypeError(f"{head} compares {t_left} with {t_right}", node.loc)
            return _atom(sig, head, radius, m, n, left, right)
        if head in ("and", "or"):
            if not args:
                return top(sig, left, right) if head == "and" else bottom(sig, left, right)
            parts = [self._build(a, left, right) for a in args]
            result = parts[0]
            for part in parts[1:]:
                result = result.meet(part) if head == "and" else result.join(part)
            return result
        if head == "not":
            arity(1)
            return self._build(args[0], left, right).complement()
        if head == "implies":
            arity(2)
            return self._build(args[0], left, right).implies(self._build(args[1], left, right))
        if head in ("exists-left", "forall-left", "exists-right", "forall-right"):
            arity(3)
            if not isinstance(args[0], Atom):
                raise ParseError(f"{head} binds a variable name", args[0].loc)
            var, t = args[0].text, type_from_sexpr(args[1])
            on_left = head.endswith("left")
            body = self._build(args[2], left + ((var, t),) if on_left else left,
                               right if on_left else right + ((var, t),))
            quantify = {"exists-left": body.exists_left, "forall-left": body.forall_left,
                        "exists-right": body.exists_right, "forall-right": body.forall_right}[head]
            return quantify(var)
        if head == "lift":
            arity(3)
            if len(left) != 1 or len(right) != 1 or not all(
                    isinstance(t, MonadicType) for _, t in left + right):
                raise TermTypeError("lift relates one monadic variable on each side", node.loc)
            inner = self._build(args[2], ((left[0][0], left[0][1].inner),), ((right[0][0], right[0][1].inner),))
            budget_node = args[1]
            if not isinstance(budget_node, Atom):
                raise ParseError("lift budget is a number", budget_node.loc)
            return lifted(self.spec, self._grade(args[0]), parse_value(budget_node.text), inner)
        if head == "arrow":
            arity(2)
            if len(left) != 1 or len(right) != 1 or not all(
                    isinstance(t, ArrowType) for _, t in left + right):
                raise TermTypeError("arrow relates one function variable on each side", node.loc)
            (u, f), (d, g) = left[0], right[0]
            phi = self._build(args[0], ((u, f.domain),), ((d, g.domain),))
            psi = self._build(args[1], ((u, f.codomain),), ((d, g.codomain),))
            return exponential(phi, psi, self.monad)
        raise ParseError(f"unknown assertion form {head!r}", node.loc)


def _atom(sig: Signature, head: str, radius: ExtendedValue | None, m: Term, n: Term,
          left: Ctx, right: Ctx) -> Assertion:
    def values(gamma: Env, delta: Env) -> tuple[Any, Any]:
        return interpret(sig, None, m, gamma), interpret(sig, None, n, delta)

    if head == "eq":
        def member(gamma: Env, delta: Env) -> bool:
            a, b = values(gamma, delta)
            return a == b
        name = f"{format_term(m)} = {format_term(n)}"
    elif head == "diff":
        def member(gamma: Env, delta: Env) -> bool:
            a, b = values(gamma, delta)
            return abs(a - b) <= radius
        name = f"diff{format_value(radius)}({format_term(m)}, {format_term(n)})"
    else:
        def member(gamma: Env, delta: Env) -> bool:
            a, b = values(gamma, delta)
            return b == a + radius
        name = f"succ{format_value(radius)}({format_term(m)}, {format_term(n)})"

    basic = None
    if head == "eq" and len(left) == 1 and len(right) == 1 and \
            format_term(m) == left[0][0] and format_term(n) == right[0][0]:
        basic = "eq"
    return Assertion(left, right, member, sig, name, basic=basic)


def build_assertion(expr: str | SExpr, left: Iterable[tuple[str, TypeExpr]],
                    right: Iterable[tuple[str, TypeExpr]], signature: Signature,
                    spec: DivergenceSpec | None = None, monad: Monad | None = None) -> Assertion:
    """
    Build an assertion from its s-expression.

    Raises:
        ParseError: malformed syntax.
        TermTypeError: an atom's terms do not typecheck in their context.
    """
    return AssertionBuilder(signature, spec, monad).build(expr, left, right)


def includes(big: Assertion, small: Assertion) -> tuple[bool, tuple[dict, dict] | None]:
    """
    Decide small ⊆ big. Lifted assertions compare grades, budgets and inner
    relations; other assertions are compared by enumerating ``small``
    (which may live in larger contexts than ``big``).

    Returns:
        (True, None) or (False, the first pair of ``small`` outside ``big``).

    Raises:
        NonEnumerable: ``small`` has a monadic layer that is not a lifting.
    """
    if big.lift is not None and small.lift is not None:
        b, s = big.lift, small.lift
        if b.spec.name != s.spec.name:
            return False, None
        if not b.spec.grading.leq(s.grade, b.grade) or not b.spec.domain.leq(s.budget, b.budget):
            return False, None
        return includes(b.inner, s.inner)
    if big.basic == "top" and small.left == big.left and small.right == big.right:
        return True, None
    for gamma, delta in small.pairs():
        if not big.holds(gamma, delta):
            return False, (gamma, delta)
    return True, None
