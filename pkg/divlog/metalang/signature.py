"""
Computational signatures: base types with finite carriers, value operations
and effectful operations, each with a first-order type and an implementation.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Hashable, Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Literal

from divlog.core.carriers import UNIT as UNIT_CARRIER
from divlog.core.carriers import Carrier
from divlog.errors import NonEnumerable, SignatureError
from divlog.metalang.mechanisms import Kernel, get_mechanism
from divlog.metalang.types import (
    REAL,
    BaseType,
    EmptyType,
    ProductType,
    SumType,
    TypeExpr,
    UnitType,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Inj:
    """A value of a sum type."""

    side: Literal["inl", "inr"]
    value: Hashable

    def __repr__(self) -> str:
        return f"{self.side}({self.value!r})"


@dataclass(frozen=True)
class OpDecl:
    """o : (τ, τ′) with its implementation and parameters."""

    name: str
    domain: TypeExpr
    codomain: TypeExpr
    kernel: Kernel = field(repr=False)
    params: Mapping[str, Any] = field(default_factory=dict, hash=False)
    effectful: bool = False

    def apply(self, monad: Any, arg: Any) -> Any:
        return self.kernel(monad, arg, self.params)


@dataclass
class Signature:
    """Base carriers plus value and effectful operations."""

    bases: dict[str, Carrier] = field(default_factory=dict)
    value_ops: dict[str, OpDecl] = field(default_factory=dict)
    effect_ops: dict[str, OpDecl] = field(default_factory=dict)
    numeric_base: str = REAL.name

    def declare_base(self, name: str, elements: Iterable[Hashable]) -> BaseType:
        self.bases[name] = Carrier.of(name, elements)
        return BaseType(name)

    def _declare(self, table: dict[str, OpDecl], name: str, domain: TypeExpr, codomain: TypeExpr,
                 impl: str | None, params: Mapping[str, Any], effectful: bool) -> OpDecl:
        for t in (domain, codomain):
            if not t.first_order:
                raise SignatureError(f"operation {name} has non first-order type {t}")
        if name in self.value_ops or name in self.effect_ops:
            raise SignatureError(f"operation {name} is declared twice")
        mechanism = get_mechanism(impl or name)
        if mechanism.effectful != effectful:
            kind = "effectful" if mechanism.effectful else "value"
            raise SignatureError(f"{mechanism.name} is a {kind} operation")
        decl = OpDecl(name, domain, codomain, mechanism.fn, {**mechanism.defaults, **params}, effectful)
        table[name] = decl
        return decl

    def declare_value(self, name: str, domain: TypeExpr, codomain: TypeExpr,
                      impl: str | None = None, **params: Any) -> OpDecl:
        return self._declare(self.value_ops, name, domain, codomain, impl, params, effectful=False)

    def declare_effect(self, name: str, domain: TypeExpr, codomain: TypeExpr,
                       impl: str | None = None, **params: Any) -> OpDecl:
        return self._declare(self.effect_ops, name, domain, codomain, impl, params, effectful=True)

    @property
    def op_names(self) -> frozenset[str]:
        return frozenset(self.value_ops) | frozenset(self.effect_ops)

    def base_of_symbol(self, symbol: str) -> BaseType | None:
        for name, carrier in self.bases.items():
            if symbol in carrier:
                return BaseType(name)
        return None

    def carrier(self, t: TypeExpr) -> Carrier:
        """
        Finite carrier of a first-order type.

        Raises:
            NonEnumerable: for higher-order or monadic types and undeclared bases.
        """
        match t:
            case BaseType(name=name):
                if name not in self.bases:
                    raise NonEnumerable(f"base type {name} has no declared carrier")
                return self.bases[name]
            case UnitType():
                return UNIT_CARRIER
            case EmptyType():
                return Carrier("0", ())
            case ProductType(left=a, right=b):
                return self.carrier(a).product(self.carrier(b))
            case SumType(left=a, right=b):
                left, right = self.carrier(a), self.carrier(b)
                return Carrier(f"{left.name}+{right.name}",
                               tuple(Inj("inl", x) for x in left) + tuple(Inj("inr", y) for y in right))
        raise NonEnumerable(f"values of type {t} cannot be enumerated")

    def environments(self, context: Iterable[tuple[str, TypeExpr]]) -> list[dict[str, Any]]:
        """Every environment of a first-order context."""
        context = list(context)
        carriers = [self.carrier(t).elements for _, t in context]
        return [dict(zip((name for name, _ in context), values, strict=True))
                for values in itertools.product(*carriers)]


def default_signature(reals: Iterable[int] = range(5)) -> Signature:
    """R over a small integer window, arithmetic, the noise mechanisms and tick."""
    sig = Signature()
    sig.declare_base("R", (Fraction(r) for r in reals))
    pair = ProductType(REAL, REAL)
    for name in ("add", "sub", "mul", "min", "max"):
        sig.declare_value(name, pair, REAL)
    for name in ("neg", "abs"):
        sig.declare_value(name, REAL, REAL)
    sig.declare_effect("geo", REAL, REAL)
    sig.declare_effect("lap", pair, REAL)
    sig.declare_effect("norm", pair, REAL)
    sig.declare_effect("tick", REAL, UnitType())
    return sig
