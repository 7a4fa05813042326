"""
Denotational interpreter, parameterised by a monad instance and a signature.

Values are base elements (Fractions or symbols), ``()``, tuples for pairs,
``Inj`` for sums, ``Closure`` for functions and monadic values of the chosen
monad. ``let`` is Kleisli extension of the continuation that captures the
current environment, which is the strength-based semantics in a well-pointed
base.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Any

from divlog.errors import PreconditionFailed, TermTypeError, UnboundVariable, UnsupportedEffect
from divlog.metalang.parser import Program
from divlog.metalang.signature import Inj, Signature
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
from divlog.metalang.typecheck import typecheck
from divlog.metalang.types import TypeExpr
from divlog.monads.base import Monad

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Closure:
    var: str
    body: Term
    env: tuple[tuple[str, Any], ...]

    def __repr__(self) -> str:
        return f"<closure λ{self.var}>"


def interpret(signature: Signature, monad: Monad | None, term: Term,
              env: Mapping[str, Any] | None = None) -> Any:
    """
    ⟦term⟧ at ``env``. The term is assumed to typecheck.

    Raises:
        UnsupportedEffect: an effectful operation is reached without a monad,
            or the monad lacks the capability the operation needs.
    """
    return _Interpreter(signature, monad).eval(term, dict(env or {}))


class _Interpreter:
    def __init__(self, signature: Signature, monad: Monad | None):
        self.signature = signature
        self.monad = monad

    def _monad(self, term: Term) -> Monad:
        if self.monad is None:
            raise UnsupportedEffect(f"{type(term).__name__} at {term.loc} needs a monad")
        return self.monad

    def apply(self, fn: Any, arg: Any) -> Any:
        if isinstance(fn, Closure):
            return self.eval(fn.body, {**dict(fn.env), fn.var: arg})
        if callable(fn):
            return fn(arg)
        raise TermTypeError(f"cannot apply {fn!r}")

    def eval(self, term: Term, env: dict[str, Any]) -> Any:
        match term:
            case Var(name=name):
                if name not in env:
                    raise UnboundVariable(f"no value for {name}", term.loc)
                return env[name]
            case Lit(value=value):
                return value
            case ValueOp(op=op, arg=arg):
                return self.signature.value_ops[op].apply(None, self.eval(arg, env))
            case EffectOp(op=op, arg=arg):
                return self.signature.effect_ops[op].apply(self._monad(term), self.eval(arg, env))
            case UnitTerm():
                return ()
            case Pair(left=a, right=b):
                return (self.eval(a, env), self.eval(b, env))
            case Fst(body=b):
                return self.eval(b, env)[0]
            case Snd(body=b):
                return self.eval(b, env)[1]
            case Inl(body=b):
                return Inj("inl", self.eval(b, env))
            case Inr(body=b):
                return Inj("inr", self.eval(b, env))
            case Match(scrutinee=s, left_var=x, left_body=l, right_var=y, right_body=r):
                value = self.eval(s, env)
                if value.side == "inl":
                    return self.eval(l, {**env, x: value.value})
                return self.eval(r, {**env, y: value.value})
            case Absurd():
                raise PreconditionFailed(f"absurd at {term.loc} reached a value of the empty type")
            case Lam(var=x, body=b):
                return Closure(x, b, tuple(sorted(env.items(), key=lambda kv: kv[0])))
            case App(fn=f, arg=a):
                return self.apply(self.eval(f, env), self.eval(a, env))
            case Ret(body=b):
                return self._monad(term).unit(self.eval(b, env))
            case Let(var=x, bound=m, body=b):
                monad = self._monad(term)
                return monad.bind(self.eval(m, env), lambda v: self.eval(b, {**env, x: v}))
        raise TypeError(f"not a term: {term!r}")


# ── Whole programs and semantic comparison ────────────────────────────────


def run_program(program: Program, monad: Monad | None, env: Mapping[str, Any] | None = None) -> Any:
    """
    Typecheck and interpret a program's main term.

    Raises:
        PreconditionFailed: the program has no main term or an input is missing.
    """
    if program.main is None:
        raise PreconditionFailed("program has no main term")
    env = dict(env or {})
    missing = [name for name, _ in program.inputs if name not in env]
    if missing:
        raise PreconditionFailed(f"missing input(s): {', '.join(missing)}")
    main = program.resolve(program.main)
    result_type = typecheck(program.signature, program.inputs, main)
    logger.info("Running program of type %s with %s", result_type, sorted(env))
    return interpret(program.signature, monad, main, env)


def semantically_equal(signature: Signature, monad: Monad | None,
                       context: Iterable[tuple[str, TypeExpr]], left: Term, right: Term) -> dict[str, Any] | None:
    """
    Compare ⟦left⟧ and ⟦right⟧ on every environment of a first-order context.

    Returns:
        None when they agree everywhere, otherwise the first disagreeing environment.
    """
    same = monad.equal if monad is not None else (lambda a, b: a == b)
    for env in signature.environments(context):
        if not same(interpret(signature, monad, left, env), interpret(signature, monad, right, env)):
            return env
    return None


def apply_value(signature: Signature, monad: Monad | None, fn: Any, arg: Any) -> Any:
    """Apply a function value (closure or host callable) to an argument."""
    return _Interpreter(signature, monad).apply(fn, arg)
