"""
Types of the computational metalanguage.

    τ ::= b | 1 | τ × τ | 0 | τ + τ | τ → τ | T τ

First-order types (built from base types, 1, × and + only) are the ones
operation signatures may use; they are also the ones whose values can be
enumerated from base carriers.
"""

from __future__ import annotations

from dataclasses import dataclass


class TypeExpr:
    """Base class of type expressions."""

    @property
    def first_order(self) -> bool:
        return False


@dataclass(frozen=True)
class BaseType(TypeExpr):
    name: str

    @property
    def first_order(self) -> bool:
        return True

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class UnitType(TypeExpr):
    @property
    def first_order(self) -> bool:
        return True

    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True)
class EmptyType(TypeExpr):
    @property
    def first_order(self) -> bool:
        return True

    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class ProductType(TypeExpr):
    left: TypeExpr
    right: TypeExpr

    @property
    def first_order(self) -> bool:
        return self.left.first_order and self.right.first_order

    def __str__(self) -> str:
        return f"(* {self.left} {self.right})"


@dataclass(frozen=True)
class SumType(TypeExpr):
    left: TypeExpr
    right: TypeExpr

    @property
    def first_order(self) -> bool:
        return self.left.first_order and self.right.first_order

    def __str__(self) -> str:
        return f"(+ {self.left} {self.right})"


@dataclass(frozen=True)
class ArrowType(TypeExpr):
    domain: TypeExpr
    codomain: TypeExpr

    def __str__(self) -> str:
        return f"(-> {self.domain} {self.codomain})"


@dataclass(frozen=True)
class MonadicType(TypeExpr):
    inner: TypeExpr

    def __str__(self) -> str:
        return f"(T {self.inner})"


UNIT = UnitType()
EMPTY = EmptyType()
REAL = BaseType("R")


def product(*types: TypeExpr) -> TypeExpr:
    """Right-nested product; the empty product is 1."""
    if not types:
        return UNIT
    result = types[-1]
    for t in reversed(types[:-1]):
        result = ProductType(t, result)
    return result
