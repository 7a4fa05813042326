"""
Raw terms of the metalanguage, free variables and capture-avoiding substitution.

    M ::= x | lit | o(M) | c(M) | () | ⟨M, M⟩ | fst M | snd M
        | inl M | inr M | match M (x. M) (y. M) | absurd M
        | λx:τ. M | M M | ret M | let x = M in M

Every node carries its source location (ignored by equality).
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from fractions import Fraction

from divlog.core.values import format_value
from divlog.errors import Location
from divlog.metalang.types import TypeExpr


def _loc():
    return field(default=None, compare=False, repr=False)


class Term:
    """Base class of term nodes."""

    loc: Location | None


@dataclass(frozen=True)
class Var(Term):
    name: str
    loc: Location | None = _loc()


@dataclass(frozen=True)
class Lit(Term):
    """A numeric or symbolic constant of a base type."""

    value: Fraction | str
    loc: Location | None = _loc()


@dataclass(frozen=True)
class ValueOp(Term):
    op: str
    arg: Term
    loc: Location | None = _loc()


@dataclass(frozen=True)
class EffectOp(Term):
    op: str
    arg: Term
    loc: Location | None = _loc()


@dataclass(frozen=True)
class UnitTerm(Term):
    loc: Location | None = _loc()


@dataclass(frozen=True)
class Pair(Term):
    left: Term
    right: Term
    loc: Location | None = _loc()


@dataclass(frozen=True)
class Fst(Term):
    body: Term
    loc: Location | None = _loc()


@dataclass(frozen=True)
class Snd(Term):
    body: Term
    loc: Location | None = _loc()


@dataclass(frozen=True)
class Inl(Term):
    body: Term
    other: TypeExpr
    loc: Location | None = _loc()


@dataclass(frozen=True)
class Inr(Term):
    body: Term
    other: TypeExpr
    loc: Location | None = _loc()


@dataclass(frozen=True)
class Match(Term):
    scrutinee: Term
    left_var: str
    left_body: Term
    right_var: str
    right_body: Term
    loc: Location | None = _loc()


@dataclass(frozen=True)
class Absurd(Term):
    body: Term
    result: TypeExpr
    loc: Location | None = _loc()


@dataclass(frozen=True)
class Lam(Term):
    var: str
    var_type: TypeExpr
    body: Term
    loc: Location | None = _loc()


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term
    loc: Location | None = _loc()


@dataclass(frozen=True)
class Ret(Term):
    body: Term
    loc: Location | None = _loc()


@dataclass(frozen=True)
class Let(Term):
    var: str
    bound: Term
    body: Term
    loc: Location | None = _loc()


# ── Variables and substitution ────────────────────────────────────────────


def free_vars(term: Term) -> frozenset[str]:
    match term:
        case Var(name=name):
            return frozenset({name})
        case Lit() | UnitTerm():
            return frozenset()
        case ValueOp(arg=arg) | EffectOp(arg=arg):
            return free_vars(arg)
        case Pair(left=a, right=b) | App(fn=a, arg=b):
            return free_vars(a) | free_vars(b)
        case Fst(body=b) | Snd(body=b) | Inl(body=b) | Inr(body=b) | Absurd(body=b) | Ret(body=b):
            return free_vars(b)
        case Match(scrutinee=s, left_var=x, left_body=l, right_var=y, right_body=r):
            return free_vars(s) | (free_vars(l) - {x}) | (free_vars(r) - {y})
        case Lam(var=x, body=b):
            return free_vars(b) - {x}
        case Let(var=x, bound=m, body=b):
            return free_vars(m) | (free_vars(b) - {x})
    raise TypeError(f"not a term: {term!r}")


def fresh(base: str, avoid: frozenset[str] | set[str]) -> str:
    if base not in avoid:
        return base
    for k in itertools.count(1):
        candidate = f"{base}{k}"
        if candidate not in avoid:
            return candidate
    raise AssertionError("unreachable")


def substitute(term: Term, mapping: Mapping[str, Term]) -> Term:
    """Capture-avoiding simultaneous substitution M[θ]."""
    if not mapping:
        return term
    match term:
        case Var(name=name):
            return mapping.get(name, term)
        case Lit() | UnitTerm():
            return term
        case ValueOp(arg=arg) | EffectOp(arg=arg):
            return replace(term, arg=substitute(arg, mapping))
        case Pair(left=a, right=b):
            return replace(term, left=substitute(a, mapping), right=substitute(b, mapping))
        case App(fn=a, arg=b):
            return replace(term, fn=substitute(a, mapping), arg=substitute(b, mapping))
        case Fst(body=b) | Snd(body=b) | Inl(body=b) | Inr(body=b) | Absurd(body=b) | Ret(body=b):
            return replace(term, body=substitute(b, mapping))
        case Lam(var=x, body=b):
            x2, b2, inner = _binder(x, b, mapping)
            return replace(term, var=x2, body=substitute(b2, inner))
        case Let(var=x, bound=m, body=b):
            x2, b2, inner = _binder(x, b, mapping)
            return replace(term, var=x2, bound=substitute(m, mapping), body=substitute(b2, inner))
        case Match(scrutinee=s, left_var=x, left_body=l, right_var=y, right_body=r):
            x2, l2, left_map = _binder(x, l, mapping)
            y2, r2, right_map = _binder(y, r, mapping)
            return replace(term, scrutinee=substitute(s, mapping), left_var=x2,
                           left_body=substitute(l2, left_map), right_var=y2,
                           right_body=substitute(r2, right_map))
    raise TypeError(f"not a term: {term!r}")


def _binder(var: str, body: Term, mapping: Mapping[str, Term]) -> tuple[str, Term, dict[str, Term]]:
    """Rename a binder that would capture a free variable of the substituted terms."""
    inner = {k: v for k, v in mapping.items() if k != var}
    captured: set[str] = set()
    for value in inner.values():
        captured |= free_vars(value)
    if var not in captured:
        return var, body, inner
    renamed = fresh(var, captured | free_vars(body) | set(inner))
    return renamed, substitute(body, {var: Var(renamed)}), inner


def depth(term: Term) -> int:
    children = [c for c in vars(term).values() if isinstance(c, Term)]
    return 1 + max((depth(c) for c in children), default=0)


# ── Printing ──────────────────────────────────────────────────────────────


def format_term(term: Term) -> str:
    """Concrete s-expression syntax; ``parse_term(format_term(t)) == t``."""
    match term:
        case Var(name=name):
            return name
        case Lit(value=value):
            return format_value(value) if isinstance(value, Fraction) else f"'{value}"
        case ValueOp(op=op, arg=arg) | EffectOp(op=op, arg=arg):
            return f"({op} {format_term(arg)})"
        case UnitTerm():
            return "()"
        case Pair(left=a, right=b):
            return f"(pair {format_term(a)} {format_term(b)})"
        case Fst(body=b):
            return f"(fst {format_term(b)})"
        case Snd(body=b):
            return f"(snd {format_term(b)})"
        case Inl(body=b, other=t):
            return f"(inl {format_term(b)} {t})"
        case Inr(body=b, other=t):
            return f"(inr {format_term(b)} {t})"
        case Match(scrutinee=s, left_var=x, left_body=l, right_var=y, right_body=r):
            return f"(match {format_term(s)} ({x} {format_term(l)}) ({y} {format_term(r)}))"
        case Absurd(body=b, result=t):
            return f"(absurd {format_term(b)} {t})"
        case Lam(var=x, var_type=t, body=b):
            return f"(lambda ({x} {t}) {format_term(b)})"
        case App(fn=f, arg=a):
            return f"({format_term(f)} {format_term(a)})"
        case Ret(body=b):
            return f"(ret {format_term(b)})"
        case Let(var=x, bound=m, body=b):
            return f"(let ({x} {format_term(m)}) {format_term(b)})"
    raise TypeError(f"not a term: {term!r}")
