"""
Typing rules of the metalanguage.

Value operations o : (τ, τ′) take an argument of exactly type τ and return τ′;
effectful operations c : (τ, τ′) return T τ′. Errors carry the location of
the offending subterm.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping

from divlog.errors import TermTypeError, UnboundVariable
from divlog.metalang.signature import Signature
from divlog.metalang.syntax import (
    Absurd,
    App,
    EffectOp,
    Fst,
    Inl,
    Inr,
    Lam,
    Let,
    Lit,
    Match,
    Pair,
    Ret,
    Snd,
    Term,
    UnitTerm,
    ValueOp,
    Var,
)
from divlog.metalang.types import (
    EMPTY,
    UNIT,
    ArrowType,
    BaseType,
    MonadicType,
    ProductType,
    SumType,
    TypeExpr,
)

logger = logging.getLogger(__name__)

Context = Mapping[str, TypeExpr]


def as_context(context: Context | Iterable[tuple[str, TypeExpr]] | None) -> dict[str, TypeExpr]:
    if context is None:
        return {}
    if isinstance(context, Mapping):
        return dict(context)
    return dict(context)


def typecheck(signature: Signature, context: Context | Iterable[tuple[str, TypeExpr]] | None,
              term: Term) -> TypeExpr:
    """
    The type of ``term`` in ``context``.

    Raises:
        UnboundVariable: a variable outside the context.
        TermTypeError: any other typing failure, located at the offending subterm.
    """
    return _Checker(signature).infer(as_context(context), term)


class _Checker:
    def __init__(self, signature: Signature):
        self.signature = signature

    def fail(self, term: Term, message: str) -> TermTypeError:
        return TermTypeError(message, term.loc)

    def expect(self, ctx: dict[str, TypeExpr], term: Term, expected: TypeExpr, what: str) -> None:
        actual = self.infer(ctx, term)
        if actual != expected:
            raise self.fail(term, f"{what} expects {expected}, got {actual}")

    def infer(self, ctx: dict[str, TypeExpr], term: Term) -> TypeExpr:
        match term:
            case Var(name=name):
                if name not in ctx:
                    raise UnboundVariable(f"unbound variable {name}", term.loc)
                return ctx[name]
            case Lit(value=value):
                if isinstance(value, str):
                    base = self.signature.base_of_symbol(value)
                    if base is None:
                        raise self.fail(term, f"symbol '{value} belongs to no declared base type")
                    return base
                return BaseType(self.signature.numeric_base)
            case ValueOp(op=op, arg=arg):
                decl = self.signature.value_ops.get(op)
                if decl is None:
                    raise self.fail(term, f"unknown value operation {op}")
                self.expect(ctx, arg, decl.domain, f"value operation {op}")
                return decl.codomain
            case EffectOp(op=op, arg=arg):
                decl = self.signature.effect_ops.get(op)
                if decl is None:
                    raise self.fail(term, f"unknown effectful operation {op}")
                self.expect(ctx, arg, decl.domain, f"effectful operation {op}")
                return MonadicType(decl.codomain)
            case UnitTerm():
                return UNIT
            case Pair(left=a, right=b):
                return ProductType(self.infer(ctx, a), self.infer(ctx, b))
            case Fst(body=b) | Snd(body=b):
                t = self.infer(ctx, b)
                if not isinstance(t, ProductType):
                    raise self.fail(term, f"projection of a non-product of type {t}")
                return t.left if isinstance(term, Fst) else t.right
            case Inl(body=b, other=other):
                return SumType(self.infer(ctx, b), other)
            case Inr(body=b, other=other):
                return SumType(other, self.infer(ctx, b))
            case Match(scrutinee=s, left_var=x, left_body=l, right_var=y, right_body=r):
                t = self.infer(ctx, s)
                if not isinstance(t, SumType):
                    raise self.fail(term, f"match on a non-sum of type {t}")
                left = self.infer({**ctx, x: t.left}, l)
                right = self.infer({**ctx, y: t.right}, r)
                if left != right:
                    raise self.fail(term, f"match branches disagree: {left} vs {right}")
                return left
            case Absurd(body=b, result=result):
                self.expect(ctx, b, EMPTY, "absurd")
                return result
            case Lam(var=x, var_type=t, body=b):
                return ArrowType(t, self.infer({**ctx, x: t}, b))
            case App(fn=f, arg=a):
                t = self.infer(ctx, f)
                if not isinstance(t, ArrowType):
                    raise self.fail(term, f"application of a non-function of type {t}")
                self.expect(ctx, a, t.domain, "application")
                return t.codomain
            case Ret(body=b):
                return MonadicType(self.infer(ctx, b))
            case Let(var=x, bound=m, body=b):
                t = self.infer(ctx, m)
                if not isinstance(t, MonadicType):
                    raise self.fail(m, f"let binds a computation, got {t}")
                body = self.infer({**ctx, x: t.inner}, b)
                if not isinstance(body, MonadicType):
                    raise self.fail(b, f"let body must be a computation, got {body}")
                return body
        raise TypeError(f"not a term: {term!r}")
